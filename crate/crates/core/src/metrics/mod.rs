//! AWGN channel, PAPR / CCDF / BER / SNR measurement and the closed-form
//! references the Monte-Carlo measurements are checked against.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};
use crate::modem::{BitBlock, FrameConfig};
use crate::signal::{energy, RandomStream, TimeSeries};

/// Describes how Eb/N0 points are turned into per-sample channel SNR.
pub const EBN0_CONVENTION: &str = "snr_db = ebn0_db + 10*log10(bits_per_symbol * code_rate) - 10*log10(L); \
snr is per time-domain sample relative to the measured mean power of the emitted symbol (prefix included); \
Eb is energy per information bit on a data subcarrier at the DFT output (pilot, tail, pad and prefix energy not charged)";

/// Channel SNR (dB per sample) for an Eb/N0 point under [`EBN0_CONVENTION`].
pub fn ebn0_to_snr_db(ebn0_db: f64, cfg: &FrameConfig) -> f64 {
    let per_symbol = cfg.bits_per_symbol() as f64 * cfg.code_rate();
    ebn0_db + 10.0 * per_symbol.log10() - 10.0 * (cfg.oversampling as f64).log10()
}

/// Adds circularly-symmetric Gaussian noise at `snr_db` relative to the
/// empirical mean power of `samples`. `f64::INFINITY` disables the noise.
pub fn awgn_samples(
    samples: &[Complex64],
    snr_db: f64,
    stream: &mut RandomStream,
) -> Result<Vec<Complex64>> {
    if snr_db == f64::INFINITY {
        return Ok(samples.to_vec());
    }
    if snr_db.is_nan() {
        return Err(Error::param("snr_db", "is NaN"));
    }
    let power = energy(samples) / samples.len().max(1) as f64;
    if power == 0.0 || samples.is_empty() {
        return Err(Error::ZeroEnergy(
            "SNR is undefined for a zero-energy signal",
        ));
    }
    let sigma = (power / 10f64.powf(snr_db / 10.0) / 2.0).sqrt();
    let noise = stream.gaussian(2 * samples.len());
    Ok(samples
        .iter()
        .zip(noise.chunks_exact(2))
        .map(|(s, g)| s + Complex64::new(g[0], g[1]) * sigma)
        .collect())
}

pub fn awgn(signal: &TimeSeries, snr_db: f64, stream: &mut RandomStream) -> Result<TimeSeries> {
    signal.with_samples(awgn_samples(signal.samples(), snr_db, stream)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Papr {
    pub ratio: f64,
    pub db: f64,
}

/// `max |x|^2 / mean |x|^2`.
pub fn papr_of(samples: &[Complex64]) -> Result<Papr> {
    let (peak, sum) = samples
        .iter()
        .map(|s| s.norm_sqr())
        .fold((0.0f64, 0.0f64), |(p, s), v| (p.max(v), s + v));
    if sum == 0.0 {
        return Err(Error::ZeroEnergy("PAPR is undefined for a zero signal"));
    }
    let ratio = peak * samples.len() as f64 / sum;
    Ok(Papr {
        ratio,
        db: 10.0 * ratio.log10(),
    })
}

pub fn papr(signal: &TimeSeries) -> Result<Papr> {
    papr_of(signal.samples())
}

/// Monte-Carlo PAPR values, kept sorted so merging is order independent.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PaprSampleSet {
    values_db: Vec<f64>,
}

impl PaprSampleSet {
    pub fn from_values(mut values_db: Vec<f64>) -> Self {
        values_db.sort_by(f64::total_cmp);
        Self { values_db }
    }

    pub fn push(&mut self, db: f64) {
        let at = self.values_db.partition_point(|v| v.total_cmp(&db).is_le());
        self.values_db.insert(at, db);
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.values_db.extend(other.values_db);
        self.values_db.sort_by(f64::total_cmp);
        self
    }

    pub fn n_frames(&self) -> usize {
        self.values_db.len()
    }

    /// Ascending.
    pub fn values_db(&self) -> &[f64] {
        &self.values_db
    }

    pub fn mean_db(&self) -> f64 {
        self.values_db.iter().sum::<f64>() / self.values_db.len() as f64
    }

    /// Smallest sample value `t` with `P(PAPR > t) <= prob`.
    pub fn exceedance_threshold(&self, prob: f64) -> Option<f64> {
        let n = self.values_db.len();
        if n == 0 {
            return None;
        }
        // at most floor(prob * n) samples may lie strictly above t
        let allowed = (prob * n as f64).floor() as usize;
        let idx = n.saturating_sub(allowed + 1);
        Some(self.values_db[idx])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfCurve {
    pub thresholds_db: Vec<f64>,
    pub prob_exceed: Vec<f64>,
    pub n_samples: usize,
}

/// Fraction of samples strictly above each threshold. Thresholds are sorted first.
pub fn ccdf(samples: &PaprSampleSet, thresholds_db: &[f64]) -> Result<CcdfCurve> {
    let n = samples.n_frames();
    if n == 0 {
        return Err(Error::param("samples", "CCDF of an empty sample set"));
    }
    let mut thresholds_db = thresholds_db.to_vec();
    thresholds_db.sort_by(f64::total_cmp);
    let values = samples.values_db();
    let prob_exceed = thresholds_db
        .iter()
        .map(|t| {
            let at_or_below = values.partition_point(|v| v <= t);
            (n - at_or_below) as f64 / n as f64
        })
        .collect();
    Ok(CcdfCurve {
        thresholds_db,
        prob_exceed,
        n_samples: n,
    })
}

/// Nyquist-rate approximation `1 - (1 - e^{-gamma})^N` for `N` subcarriers.
pub fn analytic_ccdf(threshold_db: f64, n_subcarriers: usize) -> f64 {
    let gamma = 10f64.powf(threshold_db / 10.0);
    -(n_subcarriers as f64 * (-(-gamma).exp()).ln_1p()).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BerRecord {
    pub bits_sent: u64,
    pub bit_errors: u64,
}

impl BerRecord {
    pub fn ber(&self) -> f64 {
        if self.bits_sent == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits_sent as f64
        }
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            bits_sent: self.bits_sent + other.bits_sent,
            bit_errors: self.bit_errors + other.bit_errors,
        }
    }
}

pub fn ber(sent: &BitBlock, received: &BitBlock) -> Result<BerRecord> {
    ensure_len(sent.len(), received.len())?;
    let errors = sent
        .bits()
        .iter()
        .zip(received.bits())
        .filter(|(a, b)| a != b)
        .count();
    Ok(BerRecord {
        bits_sent: sent.len() as u64,
        bit_errors: errors as u64,
    })
}

/// `10 log10(sum |s|^2 / sum |noisy - s|^2)`; `+inf` when the two are identical.
pub fn snr_measure_samples(signal: &[Complex64], noisy: &[Complex64]) -> Result<f64> {
    ensure_len(signal.len(), noisy.len())?;
    let ps = energy(signal);
    if ps == 0.0 {
        return Err(Error::ZeroEnergy("reference signal has no energy"));
    }
    let pn: f64 = signal
        .iter()
        .zip(noisy)
        .map(|(s, y)| (y - s).norm_sqr())
        .sum();
    Ok(if pn == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (ps / pn).log10()
    })
}

pub fn snr_measure(signal: &TimeSeries, noisy: &TimeSeries) -> Result<f64> {
    snr_measure_samples(signal.samples(), noisy.samples())
}

/// Gaussian tail `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Bit-error probability of Gray-coded 16-QAM over AWGN:
/// `(3 Q(a) + 2 Q(3a) - Q(5a)) / 4` with `a = sqrt(0.8 Eb/N0)`.
pub fn qam16_ber_theory(ebn0_db: f64) -> f64 {
    let a = (0.8 * 10f64.powf(ebn0_db / 10.0)).sqrt();
    (3.0 * q_function(a) + 2.0 * q_function(3.0 * a) - q_function(5.0 * a)) / 4.0
}
