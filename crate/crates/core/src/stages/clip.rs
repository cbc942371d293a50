use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{SideInfo, StageOutcome};
use crate::error::{ensure_len, Error, Result};
use crate::signal::{dft, fir_filter, idft, SpectrumVector, TimeSeries};

pub const DEFAULT_CLIP_RATIO: f64 = 1.4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "type", content = "taps")]
pub enum ClipFilter {
    /// Zero every bin outside the occupied band.
    #[default]
    BrickWall,
    /// Linear-phase FIR, delay compensated.
    Taps(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClipConfig {
    /// `A = clip_ratio * RMS(input)`.
    pub clip_ratio: f64,
    pub filter: ClipFilter,
    pub iterations: usize,
}

impl Default for ClipConfig {
    fn default() -> Self {
        Self {
            clip_ratio: DEFAULT_CLIP_RATIO,
            filter: ClipFilter::BrickWall,
            iterations: 1,
        }
    }
}

impl ClipConfig {
    pub fn validate(&self) -> Result<()> {
        check_ratio(self.clip_ratio)?;
        if self.iterations == 0 {
            return Err(Error::param(
                "iterations",
                "need at least one clip/filter round",
            ));
        }
        Ok(())
    }
}

pub(crate) fn check_ratio(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        Err(Error::param(
            "clip_ratio",
            format!("must be finite and positive, got {gamma}"),
        ))
    }
}

fn check_amplitude(a: f64) -> Result<()> {
    if a > 0.0 && !a.is_nan() {
        Ok(())
    } else {
        Err(Error::param(
            "A",
            format!("clip amplitude must be positive, got {a}"),
        ))
    }
}

/// Envelope limiter `y = x * min(1, A/|x|)`. On real input this is the usual
/// three-branch clamp to `[-A, A]`.
pub fn clip(signal: &TimeSeries, amplitude: f64) -> Result<TimeSeries> {
    check_amplitude(amplitude)?;
    signal.with_samples(clip_samples(signal.samples(), amplitude).0)
}

fn clip_samples(x: &[Complex64], a: f64) -> (Vec<Complex64>, usize) {
    let mut events = 0;
    let out = x
        .iter()
        .map(|&s| {
            let m = s.norm();
            if m > a {
                events += 1;
                // exact on the real axis, where s / m is +-1
                if s.im == 0.0 {
                    Complex64::new(a.copysign(s.re), 0.0)
                } else {
                    s * (a / m)
                }
            } else {
                s
            }
        })
        .collect();
    (out, events)
}

fn brick_wall(signal: &TimeSeries, occupied: &[bool]) -> Result<TimeSeries> {
    ensure_len(signal.len(), occupied.len())?;
    let spec = dft(signal)?;
    let bins = spec
        .bins()
        .iter()
        .zip(occupied)
        .map(|(&b, &keep)| if keep { b } else { Complex64::new(0.0, 0.0) })
        .collect();
    let back = idft(&SpectrumVector::new(bins)?)?;
    signal.with_samples(back.into_samples())
}

/// `iterations` rounds of clip at `A = clip_ratio * RMS(input)` followed by
/// out-of-band filtering. `occupied` marks the in-band bins of the
/// `signal.len()`-point spectrum.
///
/// Diagnostics: `clip_amplitude`, `clip_events` (summed over rounds) and
/// `peak_regrowth_db`, the final peak relative to `A`.
pub fn clip_and_filter(
    signal: &TimeSeries,
    cfg: &ClipConfig,
    occupied: &[bool],
) -> Result<StageOutcome> {
    cfg.validate()?;
    ensure_len(signal.len(), occupied.len())?;
    let amplitude = cfg.clip_ratio * signal.rms();
    if amplitude == 0.0 {
        return Err(Error::ZeroEnergy(
            "cannot set a clip level for a zero signal",
        ));
    }
    let mut current = signal.clone();
    let mut events = 0usize;
    for _ in 0..cfg.iterations {
        let (clipped, n) = clip_samples(current.samples(), amplitude);
        events += n;
        let clipped = current.with_samples(clipped)?;
        current = match &cfg.filter {
            ClipFilter::BrickWall => brick_wall(&clipped, occupied)?,
            ClipFilter::Taps(taps) => fir_filter(&clipped, taps)?,
        };
    }
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("clip_amplitude".to_owned(), amplitude);
    diagnostics.insert("clip_events".to_owned(), events as f64);
    diagnostics.insert(
        "peak_regrowth_db".to_owned(),
        20.0 * (current.peak_magnitude() / amplitude).log10(),
    );
    Ok(StageOutcome {
        signal: current,
        side_info: SideInfo::None,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::papr;
    use crate::signal::{band_mask, oversample, RandomStream};

    fn real(v: &[f64]) -> TimeSeries {
        TimeSeries::from_samples(v.iter().map(|&r| Complex64::new(r, 0.0)).collect()).unwrap()
    }

    fn qam_body(rng: &mut RandomStream, n: usize, l: usize) -> TimeSeries {
        let levels = [-3.0, -1.0, 1.0, 3.0];
        let bins = (0..n)
            .map(|_| Complex64::new(levels[rng.index(4)], levels[rng.index(4)]) / 10f64.sqrt())
            .collect();
        oversample(&SpectrumVector::new(bins).unwrap(), l).unwrap()
    }

    #[test]
    fn real_clip_cases() {
        let y = clip(&real(&[0.5, -1.5, 1.0, -1.0, 2.0, 0.0]), 1.0).unwrap();
        let re: Vec<f64> = y.samples().iter().map(|c| c.re).collect();
        assert_eq!(re, vec![0.5, -1.0, 1.0, -1.0, 1.0, 0.0]);
    }

    #[test]
    fn complex_clip_keeps_phase() {
        let x = TimeSeries::from_samples(vec![Complex64::new(3.0, 4.0)]).unwrap();
        let y = clip(&x, 1.0).unwrap().samples()[0];
        assert!((y - Complex64::new(0.6, 0.8)).norm() < 1e-15);
    }

    #[test]
    fn clip_rejects_nonpositive_level() {
        let x = real(&[1.0]);
        assert!(clip(&x, 0.0).is_err());
        assert!(clip(&x, -1.0).is_err());
        assert!(clip(&x, f64::NAN).is_err());
    }

    #[test]
    fn inactive_clip_is_identity() {
        let mut rng = RandomStream::new(11);
        let x = qam_body(&mut rng, 64, 4);
        let cfg = ClipConfig {
            clip_ratio: 100.0,
            ..ClipConfig::default()
        };
        let out = clip_and_filter(&x, &cfg, &band_mask(64, 4)).unwrap();
        for (a, b) in out.signal.samples().iter().zip(x.samples()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(out.diagnostics["clip_events"], 0.0);
    }

    #[test]
    fn out_of_band_is_zero_after_filter() {
        let mut rng = RandomStream::new(12);
        let x = qam_body(&mut rng, 64, 4);
        let mask = band_mask(64, 4);
        let out = clip_and_filter(&x, &ClipConfig::default(), &mask).unwrap();
        assert!(out.diagnostics["clip_events"] > 0.0);
        let spec = dft(&out.signal).unwrap();
        let oob: f64 = spec
            .bins()
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| !m)
            .map(|(b, _)| b.norm_sqr())
            .sum();
        assert!(oob < 1e-24, "{oob}");
    }

    #[test]
    fn mostly_reduces_papr() {
        let mut rng = RandomStream::new(13);
        let mask = band_mask(64, 4);
        let cfg = ClipConfig {
            clip_ratio: 1.2,
            ..ClipConfig::default()
        };
        let trials = 500;
        let (mut better, mut gain) = (0, 0.0);
        for _ in 0..trials {
            let x = qam_body(&mut rng, 64, 4);
            let before = papr(&x).unwrap().db;
            let after = papr(&clip_and_filter(&x, &cfg, &mask).unwrap().signal)
                .unwrap()
                .db;
            if after <= before {
                better += 1;
            }
            gain += before - after;
        }
        assert!(better as f64 >= 0.95 * trials as f64, "{better}/{trials}");
        assert!(gain / trials as f64 > 0.0);
    }

    #[test]
    fn taps_filter_and_validation() {
        let x = real(&[3.0, 0.1, 0.1, 0.1]);
        let cfg = ClipConfig {
            clip_ratio: 1.0,
            filter: ClipFilter::Taps(vec![1.0]),
            iterations: 2,
        };
        let out = clip_and_filter(&x, &cfg, &[true; 4]).unwrap();
        assert!(out.signal.peak_magnitude() <= out.diagnostics["clip_amplitude"] + 1e-12);
        assert!(clip_and_filter(
            &x,
            &ClipConfig {
                iterations: 0,
                ..cfg.clone()
            },
            &[true; 4]
        )
        .is_err());
        assert!(clip_and_filter(&x, &cfg, &[true; 3]).is_err());
    }
}
