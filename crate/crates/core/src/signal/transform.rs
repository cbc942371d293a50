//! Unitary transforms with the transmit-side `e^{-j}` convention.
//!
//! `idft` maps subcarriers to time with `x[t] = N^{-1/2} sum_n X_n e^{-j 2 pi n t / N}`
//! and `dft` is its exact inverse (`e^{+j}`). Both are backed by `rustfft`, which
//! plans radix-2/mixed-radix kernels for smooth sizes and Bluestein/Rader for the
//! rest, so every length is accepted.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::{check_finite, SpectrumVector, TimeSeries};
use crate::error::{Error, Result};

type PlanCache = (FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>);

thread_local! {
    static PLANS: RefCell<PlanCache> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let forward = direction == FftDirection::Forward;
    PLANS.with(|cell| {
        let (planner, cache) = &mut *cell.borrow_mut();
        cache
            .entry((len, forward))
            .or_insert_with(|| planner.plan_fft(len, direction))
            .clone()
    })
}

/// In-place unitary transform; `Forward` is the `e^{-j}` kernel.
pub(crate) fn unitary_in_place(buf: &mut [Complex64], direction: FftDirection) {
    if buf.is_empty() {
        return;
    }
    plan(buf.len(), direction).process(buf);
    let scale = 1.0 / (buf.len() as f64).sqrt();
    buf.iter_mut().for_each(|v| *v *= scale);
}

/// Subcarriers to Nyquist-rate time samples.
pub fn idft(spectrum: &SpectrumVector) -> Result<TimeSeries> {
    check_finite(spectrum.bins())?;
    let mut buf = spectrum.bins().to_vec();
    unitary_in_place(&mut buf, FftDirection::Forward);
    TimeSeries::new(buf, 1.0, 1)
}

/// Exact inverse of [`idft`]. The input length becomes `N`.
pub fn dft(signal: &TimeSeries) -> Result<SpectrumVector> {
    check_finite(signal.samples())?;
    let mut buf = signal.samples().to_vec();
    unitary_in_place(&mut buf, FftDirection::Inverse);
    SpectrumVector::new(buf)
}

/// Position of subcarrier `n` (of `n_bins`) inside the zero-padded `n_bins * factor`
/// spectrum. The lower half keeps its index; for odd `n_bins` it holds the extra bin.
pub fn band_bin(n: usize, n_bins: usize, factor: usize) -> usize {
    let lower = n_bins.div_ceil(2);
    if n < lower {
        n
    } else {
        n_bins * factor - n_bins + n
    }
}

/// Occupied-bin mask of length `n_bins * factor`.
pub fn band_mask(n_bins: usize, factor: usize) -> Vec<bool> {
    let mut mask = vec![false; n_bins * factor];
    for n in 0..n_bins {
        mask[band_bin(n, n_bins, factor)] = true;
    }
    mask
}

/// Band-limited interpolation by `factor`: zero-insertion between the spectral
/// halves, scaled so that `out[t * factor] == idft(spectrum)[t]`.
pub fn oversample(spectrum: &SpectrumVector, factor: usize) -> Result<TimeSeries> {
    if factor == 0 {
        return Err(Error::param(
            "factor_L",
            "oversampling factor must be at least 1",
        ));
    }
    check_finite(spectrum.bins())?;
    let n = spectrum.len();
    let scale = (factor as f64).sqrt();
    let mut buf = vec![Complex64::new(0.0, 0.0); n * factor];
    for (k, x) in spectrum.bins().iter().enumerate() {
        buf[band_bin(k, n, factor)] = x * scale;
    }
    unitary_in_place(&mut buf, FftDirection::Forward);
    TimeSeries::new(buf, 1.0 / factor as f64, factor)
}

/// Inverse of [`oversample`]: transform an `n_bins * L` body and pick the occupied bins.
pub fn extract_band(signal: &TimeSeries, n_bins: usize) -> Result<SpectrumVector> {
    let factor = signal.oversampling();
    crate::error::ensure_len(n_bins * factor, signal.len())?;
    let full = dft(signal)?;
    let scale = 1.0 / (factor as f64).sqrt();
    let bins = (0..n_bins)
        .map(|k| full.bins()[band_bin(k, n_bins, factor)] * scale)
        .collect();
    SpectrumVector::new(bins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::RandomStream;
    use std::f64::consts::PI;

    fn direct_idft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|t| {
                x.iter()
                    .enumerate()
                    .map(|(k, v)| {
                        v * Complex64::from_polar(1.0, -2.0 * PI * (k * t) as f64 / n as f64)
                    })
                    .sum::<Complex64>()
                    / (n as f64).sqrt()
            })
            .collect()
    }

    fn random_spectrum(n: usize, seed: u64) -> SpectrumVector {
        let mut rng = RandomStream::new(seed);
        let g = rng.gaussian(2 * n);
        SpectrumVector::new(
            (0..n)
                .map(|i| Complex64::new(g[2 * i], g[2 * i + 1]))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn dc_bin_gives_constant_envelope() {
        for n in [2, 7, 8, 12, 64] {
            let mut bins = vec![Complex64::new(0.0, 0.0); n];
            bins[0] = Complex64::new((n as f64).sqrt(), 0.0);
            let x = idft(&SpectrumVector::new(bins).unwrap()).unwrap();
            assert!(x.samples().iter().all(|s| (s - 1.0).norm() < 1e-12));
        }
    }

    #[test]
    fn zeros_map_to_zeros() {
        let x = idft(&SpectrumVector::zeros(8).unwrap()).unwrap();
        assert!(x.samples().iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn constant_signal_transforms_to_dc() {
        let x = TimeSeries::from_samples(vec![Complex64::new(1.0, 0.0); 8]).unwrap();
        let spec = dft(&x).unwrap();
        assert!((spec.bins()[0] - 8f64.sqrt()).norm() < 1e-12);
        assert!(spec.bins()[1..].iter().all(|b| b.norm() < 1e-12));
    }

    #[test]
    fn matches_direct_summation_at_non_power_of_two() {
        let spec = random_spectrum(12, 3);
        let fast = idft(&spec).unwrap();
        for (a, b) in fast.samples().iter().zip(direct_idft(spec.bins())) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn non_finite_bin_is_reported() {
        let mut bins = vec![Complex64::new(0.0, 0.0); 8];
        bins[5] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(
            SpectrumVector::new(bins),
            Err(Error::NonFinite { index: 5 })
        ));
    }

    #[test]
    fn oversample_factor_one_is_idft() {
        let spec = random_spectrum(12, 9);
        assert_eq!(
            oversample(&spec, 1).unwrap().samples(),
            idft(&spec).unwrap().samples()
        );
        assert!(oversample(&spec, 0).is_err());
    }

    #[test]
    fn oversample_preserves_nyquist_samples() {
        for n in [8, 11, 12, 64] {
            let spec = random_spectrum(n, n as u64);
            let base = idft(&spec).unwrap();
            let over = oversample(&spec, 4).unwrap();
            assert_eq!(over.len(), 4 * n);
            for t in 0..n {
                assert!((over.samples()[4 * t] - base.samples()[t]).norm() < 1e-9);
            }
            let back = extract_band(&over, n).unwrap();
            for (a, b) in back.bins().iter().zip(spec.bins()) {
                assert!((a - b).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn dc_oversampled_is_constant() {
        let mut bins = vec![Complex64::new(0.0, 0.0); 8];
        bins[0] = Complex64::new(8f64.sqrt(), 0.0);
        let over = oversample(&SpectrumVector::new(bins).unwrap(), 3).unwrap();
        assert_eq!(over.len(), 24);
        assert!(over.samples().iter().all(|s| (s - 1.0).norm() < 1e-12));
    }

    #[test]
    fn band_mask_counts_subcarriers() {
        let mask = band_mask(7, 4);
        assert_eq!(mask.iter().filter(|m| **m).count(), 7);
        // odd N: four low bins, three high bins
        assert!(mask[..4].iter().all(|m| *m));
        assert!(mask[25..].iter().all(|m| *m));
    }
}
