//! Complex-vector numerics shared by every other module: unitary transforms,
//! band-limited oversampling, FIR filtering, window design and the seeded
//! random source.

mod fir;
mod rng;
mod transform;
mod window;

pub use fir::fir_filter;
pub use rng::{derive_seed, draw_gaussian, RandomStream};
pub use transform::{band_bin, band_mask, dft, extract_band, idft, oversample};
pub use window::{
    composite_window, flat_top_window, flat_top_window_symmetric, slepian_window,
    WindowCoefficients, WindowKind, FLAT_TOP_COEFFICIENTS,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A complex baseband sample.
pub type ComplexSample = Complex64;

pub(crate) fn check_finite(samples: &[Complex64]) -> Result<()> {
    match samples
        .iter()
        .position(|s| !(s.re.is_finite() && s.im.is_finite()))
    {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

pub(crate) fn energy(samples: &[Complex64]) -> f64 {
    samples.iter().map(|s| s.norm_sqr()).sum()
}

/// Frequency-domain subcarrier values `X_0 .. X_{N-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumVector {
    bins: Vec<Complex64>,
}

impl SpectrumVector {
    /// Validates finiteness and `N >= 2`. Any `N` is accepted, not only powers of two.
    pub fn new(bins: Vec<Complex64>) -> Result<Self> {
        if bins.len() < 2 {
            return Err(Error::param(
                "N",
                format!("need at least 2 bins, got {}", bins.len()),
            ));
        }
        check_finite(&bins)?;
        Ok(Self { bins })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn into_bins(self) -> Vec<Complex64> {
        self.bins
    }

    /// Pointwise product with a phase (or any weight) sequence of the same length.
    pub fn weighted(&self, weights: &[Complex64]) -> Result<Self> {
        crate::error::ensure_len(self.len(), weights.len())?;
        let bins = self.bins.iter().zip(weights).map(|(x, w)| x * w).collect();
        Self::new(bins)
    }
}

/// Time-domain complex baseband samples at period `T / L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    samples: Vec<Complex64>,
    sample_period: f64,
    oversampling: usize,
}

impl TimeSeries {
    pub fn new(samples: Vec<Complex64>, sample_period: f64, oversampling: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::param(
                "samples",
                "time series must hold at least one sample",
            ));
        }
        if !(sample_period > 0.0 && sample_period.is_finite()) {
            return Err(Error::param(
                "sample_period",
                format!("must be positive, got {sample_period}"),
            ));
        }
        if oversampling == 0 {
            return Err(Error::param("oversampling", "factor must be at least 1"));
        }
        check_finite(&samples)?;
        Ok(Self {
            samples,
            sample_period,
            oversampling,
        })
    }

    /// Nyquist-rate series with unit sample period.
    pub fn from_samples(samples: Vec<Complex64>) -> Result<Self> {
        Self::new(samples, 1.0, 1)
    }

    /// Same timing metadata, new samples. Length may differ (used for CP handling).
    pub fn with_samples(&self, samples: Vec<Complex64>) -> Result<Self> {
        Self::new(samples, self.sample_period, self.oversampling)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn oversampling(&self) -> usize {
        self.oversampling
    }

    pub fn energy(&self) -> f64 {
        energy(&self.samples)
    }

    pub fn mean_power(&self) -> f64 {
        self.energy() / self.len() as f64
    }

    pub fn rms(&self) -> f64 {
        self.mean_power().sqrt()
    }

    pub fn peak_magnitude(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }
}
