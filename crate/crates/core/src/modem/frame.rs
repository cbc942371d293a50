use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CodeSpec;
use crate::error::{Error, Result};
use crate::signal::SpectrumVector;

/// Default payload unit per frame, in information bits.
pub const DEFAULT_PAYLOAD_BITS: usize = 96;

/// Layout and coding parameters of one OFDM frame.
///
/// Pilots default to `n_pilots` evenly spaced bins (`k * N / n_pilots`) carrying
/// `1 + 0j`. When `payload_bits` is unset the payload is 96 bits, reduced to the
/// largest count that still fits the data bins after coding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrameConfig {
    pub n_subcarriers: usize,
    pub n_pilots: usize,
    pub pilot_positions: Option<Vec<usize>>,
    pub pilot_value: Complex64,
    pub qam_order: usize,
    pub cp_fraction: f64,
    pub oversampling: usize,
    pub coding: bool,
    pub code: CodeSpec,
    pub payload_bits: Option<usize>,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            n_subcarriers: 64,
            n_pilots: 4,
            pilot_positions: None,
            pilot_value: Complex64::new(1.0, 0.0),
            qam_order: 16,
            cp_fraction: 0.25,
            oversampling: 4,
            coding: true,
            code: CodeSpec::default(),
            payload_bits: None,
        }
    }
}

impl FrameConfig {
    /// Copy with a different subcarrier count. Explicit pilot positions are kept
    /// and re-validated.
    pub fn with_subcarriers(&self, n: usize) -> Self {
        Self {
            n_subcarriers: n,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_subcarriers;
        if n < 2 {
            return Err(Error::param(
                "n_subcarriers",
                format!("need at least 2, got {n}"),
            ));
        }
        if self.n_pilots >= n {
            return Err(Error::param(
                "n_pilots",
                format!("{} pilots leave no data bins in N = {n}", self.n_pilots),
            ));
        }
        if self.qam_order != 16 {
            return Err(Error::param(
                "qam_order",
                format!("only 16-QAM is supported, got {}", self.qam_order),
            ));
        }
        if !(0.0..1.0).contains(&self.cp_fraction) {
            return Err(Error::param(
                "cp_fraction",
                format!("must be in [0, 1), got {}", self.cp_fraction),
            ));
        }
        if self.oversampling == 0 {
            return Err(Error::param("oversampling", "factor must be at least 1"));
        }
        if !(self.pilot_value.re.is_finite() && self.pilot_value.im.is_finite()) {
            return Err(Error::param("pilot_value", "must be finite"));
        }
        if let Some(pos) = &self.pilot_positions {
            if pos.len() != self.n_pilots {
                return Err(Error::param(
                    "pilot_positions",
                    format!("{} positions given for {} pilots", pos.len(), self.n_pilots),
                ));
            }
            let mut seen = vec![false; n];
            for &p in pos {
                if p >= n || std::mem::replace(&mut seen[p], true) {
                    return Err(Error::param(
                        "pilot_positions",
                        format!("position {p} is out of range or repeated"),
                    ));
                }
            }
        }
        if self.coding {
            self.code.validate()?;
        }
        let max = self.max_payload_bits();
        if max == 0 {
            return Err(Error::param(
                "n_subcarriers",
                format!(
                    "N = {n} with {} pilots cannot carry a coded payload",
                    self.n_pilots
                ),
            ));
        }
        if let Some(p) = self.payload_bits {
            if p == 0 || p > max {
                return Err(Error::param(
                    "payload_bits",
                    format!("must be in 1..={max} for this frame, got {p}"),
                ));
            }
        }
        Ok(())
    }

    pub fn pilot_positions(&self) -> Vec<usize> {
        match &self.pilot_positions {
            Some(p) => p.clone(),
            None => (0..self.n_pilots)
                .map(|k| k * self.n_subcarriers / self.n_pilots)
                .collect(),
        }
    }

    /// Data-bearing bins in ascending order.
    pub fn data_bins(&self) -> Vec<usize> {
        let pilots = self.pilot_positions();
        (0..self.n_subcarriers)
            .filter(|b| !pilots.contains(b))
            .collect()
    }

    pub fn data_len(&self) -> usize {
        self.n_subcarriers - self.n_pilots
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.qam_order.trailing_zeros() as usize
    }

    /// Channel bits per frame.
    pub fn capacity_bits(&self) -> usize {
        self.data_len() * self.bits_per_symbol()
    }

    fn max_payload_bits(&self) -> usize {
        let cap = self.capacity_bits();
        if self.coding {
            let tail = self.code.constraint_length as usize - 1;
            (cap / 2).saturating_sub(tail)
        } else {
            cap
        }
    }

    /// Information bits carried per frame.
    pub fn payload_bits(&self) -> usize {
        self.payload_bits
            .unwrap_or_else(|| DEFAULT_PAYLOAD_BITS.min(self.max_payload_bits()))
    }

    /// Channel bits actually used by the (coded) payload.
    pub fn coded_bits(&self) -> usize {
        if self.coding {
            self.code.encoded_len(self.payload_bits())
        } else {
            self.payload_bits()
        }
    }

    /// Filler bits appended to fill the data bins.
    pub fn pad_bits(&self) -> usize {
        self.capacity_bits() - self.coded_bits()
    }

    /// Information bits per channel bit (nominal code rate when coded).
    pub fn code_rate(&self) -> f64 {
        if self.coding {
            let (num, den) = self.code.rate();
            num as f64 / den as f64
        } else {
            1.0
        }
    }

    pub fn body_len(&self) -> usize {
        self.n_subcarriers * self.oversampling
    }

    pub fn cp_len(&self) -> usize {
        (self.cp_fraction * self.body_len() as f64).round() as usize
    }

    /// Spectrum with pilots only and zero data bins.
    pub fn pilot_spectrum(&self) -> Result<SpectrumVector> {
        let mut bins = vec![Complex64::new(0.0, 0.0); self.n_subcarriers];
        for p in self.pilot_positions() {
            bins[p] = self.pilot_value;
        }
        SpectrumVector::new(bins)
    }
}

/// Place pilots and fill the remaining bins with data in ascending index order.
pub fn assemble_frame(symbols: &[Complex64], cfg: &FrameConfig) -> Result<SpectrumVector> {
    crate::error::ensure_len(cfg.data_len(), symbols.len())?;
    let mut bins = vec![Complex64::new(0.0, 0.0); cfg.n_subcarriers];
    for p in cfg.pilot_positions() {
        bins[p] = cfg.pilot_value;
    }
    for (bin, s) in cfg.data_bins().into_iter().zip(symbols) {
        bins[bin] = *s;
    }
    SpectrumVector::new(bins)
}

/// Data symbols of a frame, in the order [`assemble_frame`] placed them.
pub fn disassemble_frame(spectrum: &SpectrumVector, cfg: &FrameConfig) -> Result<Vec<Complex64>> {
    crate::error::ensure_len(cfg.n_subcarriers, spectrum.len())?;
    Ok(cfg
        .data_bins()
        .into_iter()
        .map(|b| spectrum.bins()[b])
        .collect())
}
