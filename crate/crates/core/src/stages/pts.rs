use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_alphabet, quarter_turns, SideInfo, StageOutcome};
use crate::error::{Error, Result};
use crate::metrics::papr_of;
use crate::signal::{oversample, SpectrumVector};

/// Largest exhaustive search run without being asked for it explicitly.
pub const DEFAULT_SEARCH_CAP: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Partition {
    /// Block `v` holds bins `v*N/V .. (v+1)*N/V`.
    #[default]
    Adjacent,
    /// Bin `n` belongs to block `n mod V`.
    Interleaved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PtsSearch {
    Exhaustive,
    /// One coordinate-descent pass over blocks `2..V`.
    IterativeFlip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PtsConfig {
    pub n_subblocks: usize,
    pub partition: Partition,
    pub phase_set: Vec<Complex64>,
    /// `None` picks exhaustive when `|W|^(V-1) <= search_cap`, iterative flip otherwise.
    pub search: Option<PtsSearch>,
    pub search_cap: u64,
}

impl Default for PtsConfig {
    fn default() -> Self {
        Self {
            n_subblocks: 4,
            partition: Partition::Adjacent,
            phase_set: quarter_turns(),
            search: None,
            search_cap: DEFAULT_SEARCH_CAP,
        }
    }
}

impl PtsConfig {
    pub fn validate(&self, n_bins: usize) -> Result<()> {
        let v = self.n_subblocks;
        if v == 0 || !n_bins.is_multiple_of(v) {
            return Err(Error::param(
                "n_subblocks_V",
                format!("V = {v} must divide N = {n_bins}"),
            ));
        }
        check_alphabet("phase_set", &self.phase_set)
    }

    pub fn combinations(&self) -> u128 {
        (self.phase_set.len() as u128).saturating_pow(self.n_subblocks.saturating_sub(1) as u32)
    }

    pub fn resolved_search(&self) -> Result<PtsSearch> {
        let count = self.combinations();
        match self.search {
            Some(PtsSearch::Exhaustive) if count > self.search_cap as u128 => {
                Err(Error::SearchTooLarge {
                    combinations: count,
                    cap: self.search_cap,
                })
            }
            Some(s) => Ok(s),
            None if count <= self.search_cap as u128 => Ok(PtsSearch::Exhaustive),
            None => Ok(PtsSearch::IterativeFlip),
        }
    }

    /// Sub-block index of every bin.
    pub fn block_of(&self, n_bins: usize) -> Vec<usize> {
        let v = self.n_subblocks;
        (0..n_bins)
            .map(|n| match self.partition {
                Partition::Adjacent => n / (n_bins / v),
                Partition::Interleaved => n % v,
            })
            .collect()
    }
}

/// Expand per-block phases to per-bin weights.
pub fn pts_weights(cfg: &PtsConfig, n_bins: usize, phases: &[Complex64]) -> Vec<Complex64> {
    cfg.block_of(n_bins)
        .into_iter()
        .map(|b| phases[b])
        .collect()
}

fn peak_to_mean(buf: &[Complex64]) -> f64 {
    let (peak, sum) = buf
        .iter()
        .map(|s| s.norm_sqr())
        .fold((0.0f64, 0.0f64), |(p, s), v| (p.max(v), s + v));
    peak * buf.len() as f64 / sum
}

struct Search<'a> {
    parts: Vec<Vec<Complex64>>,
    phase_set: &'a [Complex64],
    buf: Vec<Complex64>,
}

impl Search<'_> {
    fn score(&mut self, choice: &[usize]) -> f64 {
        self.buf.copy_from_slice(&self.parts[0]);
        for (part, &c) in self.parts[1..].iter().zip(choice) {
            let b = self.phase_set[c];
            for (acc, s) in self.buf.iter_mut().zip(part) {
                *acc += b * s;
            }
        }
        peak_to_mean(&self.buf)
    }
}

/// Phase-optimised partial transmit sequences. The sub-block signals are
/// transformed once and the search only forms weighted sums; the returned
/// signal is `oversample(X * b, L)` for the chosen phases `b` (with `b[0] = 1`).
///
/// Diagnostics: `combinations_scanned`, `selected_papr_db`.
pub fn pts_transform(
    spectrum: &SpectrumVector,
    cfg: &PtsConfig,
    oversampling: usize,
) -> Result<StageOutcome> {
    let n = spectrum.len();
    cfg.validate(n)?;
    let search = cfg.resolved_search()?;
    let v = cfg.n_subblocks;
    let blocks = cfg.block_of(n);
    let zero = Complex64::new(0.0, 0.0);
    let parts = (0..v)
        .map(|k| {
            let bins = spectrum
                .bins()
                .iter()
                .zip(&blocks)
                .map(|(&x, &b)| if b == k { x } else { zero })
                .collect();
            Ok(oversample(&SpectrumVector::new(bins)?, oversampling)?.into_samples())
        })
        .collect::<Result<Vec<_>>>()?;
    let len = parts[0].len();
    let mut s = Search {
        parts,
        phase_set: &cfg.phase_set,
        buf: vec![zero; len],
    };

    let w = cfg.phase_set.len();
    let mut scanned = 0u64;
    let choice = match search {
        PtsSearch::Exhaustive => {
            // combination index in base |W|, last block fastest; ties keep the earlier one
            let total = cfg.combinations() as u64;
            let mut digits = vec![0usize; v - 1];
            let mut best = (f64::INFINITY, digits.clone());
            for idx in 0..total {
                let mut rest = idx as usize;
                for d in digits.iter_mut().rev() {
                    *d = rest % w;
                    rest /= w;
                }
                let score = s.score(&digits);
                scanned += 1;
                if score < best.0 {
                    best = (score, digits.clone());
                }
            }
            best.1
        }
        PtsSearch::IterativeFlip => {
            // start from all-+1 when the set has it, else from the first element
            let start = cfg
                .phase_set
                .iter()
                .position(|p| (p - Complex64::new(1.0, 0.0)).norm() < 1e-12)
                .unwrap_or(0);
            let mut digits = vec![start; v - 1];
            let mut best = s.score(&digits);
            scanned += 1;
            for k in 0..digits.len() {
                let keep = digits[k];
                let mut pick = keep;
                for c in 0..w {
                    if c == keep {
                        continue;
                    }
                    digits[k] = c;
                    let score = s.score(&digits);
                    scanned += 1;
                    if score < best {
                        best = score;
                        pick = c;
                    }
                }
                digits[k] = pick;
            }
            digits
        }
    };

    let mut phases = vec![Complex64::new(1.0, 0.0)];
    phases.extend(choice.iter().map(|&c| cfg.phase_set[c]));
    let signal = oversample(
        &spectrum.weighted(&pts_weights(cfg, n, &phases))?,
        oversampling,
    )?;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("combinations_scanned".to_owned(), scanned as f64);
    diagnostics.insert("selected_papr_db".to_owned(), papr_of(signal.samples())?.db);
    Ok(StageOutcome {
        signal,
        side_info: SideInfo::PtsPhases(phases),
        diagnostics,
    })
}

pub fn pts_restore(
    spectrum: &SpectrumVector,
    cfg: &PtsConfig,
    phases: &[Complex64],
) -> Result<SpectrumVector> {
    cfg.validate(spectrum.len())?;
    if phases.len() != cfg.n_subblocks {
        return Err(Error::param(
            "side_info",
            format!(
                "{} PTS phases for {} sub-blocks",
                phases.len(),
                cfg.n_subblocks
            ),
        ));
    }
    let conj: Vec<Complex64> = phases.iter().map(|p| p.conj()).collect();
    spectrum.weighted(&pts_weights(cfg, spectrum.len(), &conj))
}
