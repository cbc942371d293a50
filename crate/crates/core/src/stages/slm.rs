use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_alphabet, quarter_turns, SideInfo, StageOutcome};
use crate::error::{Error, Result};
use crate::metrics::papr_of;
use crate::signal::{oversample, RandomStream, SpectrumVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlmConfig {
    pub n_candidates: usize,
    pub phase_alphabet: Vec<Complex64>,
    pub include_identity: bool,
    /// Seeds the phase sequences, which are shared with the receiver.
    pub seed: u64,
}

impl Default for SlmConfig {
    fn default() -> Self {
        Self {
            n_candidates: 16,
            phase_alphabet: quarter_turns(),
            include_identity: true,
            seed: 0x5e1e_c7ed,
        }
    }
}

impl SlmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_candidates == 0 {
            return Err(Error::param(
                "n_candidates_M",
                "need at least one candidate",
            ));
        }
        check_alphabet("phase_alphabet", &self.phase_alphabet)
    }
}

/// The `M` phase sequences of length `n`. Sequence `m` depends only on the
/// seed and on `m`, so a larger `M` extends a smaller one.
pub fn slm_phase_sequences(cfg: &SlmConfig, n: usize) -> Result<Vec<Vec<Complex64>>> {
    cfg.validate()?;
    let mut rng = RandomStream::new(cfg.seed);
    let one = Complex64::new(1.0, 0.0);
    Ok((0..cfg.n_candidates)
        .map(|m| {
            if m == 0 && cfg.include_identity {
                vec![one; n]
            } else {
                (0..n)
                    .map(|_| cfg.phase_alphabet[rng.index(cfg.phase_alphabet.len())])
                    .collect()
            }
        })
        .collect())
}

/// Smallest-PAPR candidate `oversample(X * P_m, L)`. Ties keep the lower index.
///
/// Diagnostics: `selected_index`, `baseline_papr_db`, `selected_papr_db`.
pub fn slm_transform(
    spectrum: &SpectrumVector,
    cfg: &SlmConfig,
    oversampling: usize,
) -> Result<StageOutcome> {
    let sequences = slm_phase_sequences(cfg, spectrum.len())?;
    let mut best: Option<(usize, f64, crate::signal::TimeSeries)> = None;
    let mut baseline = None;
    for (m, p) in sequences.iter().enumerate() {
        let candidate = oversample(&spectrum.weighted(p)?, oversampling)?;
        let db = papr_of(candidate.samples())?.db;
        if m == 0 {
            baseline = Some(db);
        }
        if best.as_ref().is_none_or(|(_, b, _)| db < *b) {
            best = Some((m, db, candidate));
        }
    }
    let (index, db, signal) = best.expect("at least one candidate");
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("selected_index".to_owned(), index as f64);
    if cfg.include_identity {
        diagnostics.insert("baseline_papr_db".to_owned(), baseline.unwrap_or(db));
    }
    diagnostics.insert("selected_papr_db".to_owned(), db);
    Ok(StageOutcome {
        signal,
        side_info: SideInfo::SlmIndex(index),
        diagnostics,
    })
}

/// Undo the selected rotation on a received spectrum.
pub fn slm_restore(
    spectrum: &SpectrumVector,
    cfg: &SlmConfig,
    index: usize,
) -> Result<SpectrumVector> {
    let sequences = slm_phase_sequences(cfg, spectrum.len())?;
    let p = sequences.get(index).ok_or_else(|| {
        Error::param(
            "side_info",
            format!("SLM index {index} outside 0..{}", cfg.n_candidates),
        )
    })?;
    let conj: Vec<Complex64> = p.iter().map(|c| c.conj()).collect();
    spectrum.weighted(&conj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_spectrum(rng: &mut RandomStream, n: usize) -> SpectrumVector {
        let levels = [-3.0, -1.0, 1.0, 3.0];
        SpectrumVector::new(
            (0..n)
                .map(|_| Complex64::new(levels[rng.index(4)], levels[rng.index(4)]) / 10f64.sqrt())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_identity_candidate_is_baseline() {
        let x = random_spectrum(&mut RandomStream::new(1), 64);
        let cfg = SlmConfig {
            n_candidates: 1,
            ..SlmConfig::default()
        };
        let out = slm_transform(&x, &cfg, 4).unwrap();
        assert_eq!(out.side_info, SideInfo::SlmIndex(0));
        assert_eq!(out.signal, oversample(&x, 4).unwrap());
    }

    #[test]
    fn zero_candidates_rejected() {
        let x = random_spectrum(&mut RandomStream::new(2), 8);
        let cfg = SlmConfig {
            n_candidates: 0,
            ..SlmConfig::default()
        };
        assert!(slm_transform(&x, &cfg, 4).is_err());
        let cfg = SlmConfig {
            phase_alphabet: vec![Complex64::new(0.5, 0.0)],
            ..SlmConfig::default()
        };
        assert!(slm_transform(&x, &cfg, 4).is_err());
    }

    #[test]
    fn sequences_nest() {
        let small = slm_phase_sequences(
            &SlmConfig {
                n_candidates: 4,
                ..SlmConfig::default()
            },
            16,
        )
        .unwrap();
        let big = slm_phase_sequences(
            &SlmConfig {
                n_candidates: 9,
                ..SlmConfig::default()
            },
            16,
        )
        .unwrap();
        assert_eq!(small[..], big[..4]);
    }

    #[test]
    fn restore_inverts_selection() {
        let mut rng = RandomStream::new(3);
        let cfg = SlmConfig::default();
        for _ in 0..20 {
            let x = random_spectrum(&mut rng, 32);
            let out = slm_transform(&x, &cfg, 4).unwrap();
            let SideInfo::SlmIndex(m) = out.side_info else {
                panic!()
            };
            let rx = crate::signal::extract_band(&out.signal, 32).unwrap();
            let back = slm_restore(&rx, &cfg, m).unwrap();
            for (a, b) in back.bins().iter().zip(x.bins()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
