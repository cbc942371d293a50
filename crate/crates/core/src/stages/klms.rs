use std::collections::VecDeque;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};
use crate::signal::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Kernel {
    /// `exp(-|a - b|^2 / (2 width^2))`
    Gaussian { width: f64 },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Gaussian { width } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-d2 / (2.0 * width * width)).exp()
            }
        }
    }
}

/// What each tap of the input embedding holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TapFeature {
    #[default]
    Magnitude,
    Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelFilterConfig {
    pub kernel: Kernel,
    pub step: f64,
    pub dictionary_budget: usize,
    pub embedding_dim: usize,
    pub tap_feature: TapFeature,
}

impl Default for KernelFilterConfig {
    fn default() -> Self {
        Self {
            kernel: Kernel::Gaussian { width: 1.0 },
            step: 0.5,
            dictionary_budget: 64,
            embedding_dim: 3,
            tap_feature: TapFeature::Magnitude,
        }
    }
}

impl KernelFilterConfig {
    pub fn validate(&self) -> Result<()> {
        let Kernel::Gaussian { width } = self.kernel;
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::param(
                "kernel.width",
                format!("must be positive, got {width}"),
            ));
        }
        // zero is accepted and disables adaptation
        if !(self.step >= 0.0 && self.step.is_finite()) {
            return Err(Error::param(
                "step_eta",
                format!("must be finite and non-negative, got {}", self.step),
            ));
        }
        if self.dictionary_budget == 0 {
            return Err(Error::param("dictionary_budget", "must be at least 1"));
        }
        if self.embedding_dim == 0 {
            return Err(Error::param("embedding_dim", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlmsRun {
    /// Final-dictionary evaluation at every input, followed by as many zeros.
    pub output: TimeSeries,
    /// A-priori predictions, made before each sample joined the dictionary.
    pub predictions: Vec<Complex64>,
    /// `desired - prediction`, also the coefficient stored with each centre.
    pub residuals: Vec<Complex64>,
    pub dictionary_len: usize,
}

impl KlmsRun {
    /// The un-padded half of [`KlmsRun::output`].
    pub fn output_block(&self) -> &[Complex64] {
        &self.output.samples()[..self.predictions.len()]
    }
}

/// Tap-delay embedding `[f(s[n]), f(s[n-1]), ..]`, zero before the start.
pub fn embed(stream: &[Complex64], dim: usize, feature: TapFeature) -> Vec<Vec<f64>> {
    let f = |c: Complex64| match feature {
        TapFeature::Magnitude => c.norm(),
        TapFeature::Real => c.re,
    };
    (0..stream.len())
        .map(|n| {
            (0..dim)
                .map(|k| if k <= n { f(stream[n - k]) } else { 0.0 })
                .collect()
        })
        .collect()
}

/// Online kernel LMS. Each sample is predicted from the current dictionary,
/// then joins it as a centre weighted by its residual; past the budget the
/// oldest centre is dropped.
pub fn klms_filter(
    stream_in: &TimeSeries,
    desired: &TimeSeries,
    cfg: &KernelFilterConfig,
) -> Result<KlmsRun> {
    cfg.validate()?;
    ensure_len(stream_in.len(), desired.len())?;
    let inputs = embed(stream_in.samples(), cfg.embedding_dim, cfg.tap_feature);
    let eta = cfg.step;
    let evaluate = |dict: &VecDeque<(usize, Complex64)>, x: &[f64]| -> Complex64 {
        dict.iter()
            .map(|(i, r)| r * cfg.kernel.eval(&inputs[*i], x))
            .sum::<Complex64>()
            * eta
    };

    let mut dict: VecDeque<(usize, Complex64)> = VecDeque::with_capacity(cfg.dictionary_budget + 1);
    let mut predictions = Vec::with_capacity(inputs.len());
    let mut residuals = Vec::with_capacity(inputs.len());
    for (n, (x, &v)) in inputs.iter().zip(desired.samples()).enumerate() {
        let pred = evaluate(&dict, x);
        let r = v - pred;
        predictions.push(pred);
        residuals.push(r);
        dict.push_back((n, r));
        if dict.len() > cfg.dictionary_budget {
            dict.pop_front();
        }
    }

    let mut out: Vec<Complex64> = inputs.iter().map(|x| evaluate(&dict, x)).collect();
    out.resize(2 * inputs.len(), Complex64::new(0.0, 0.0));
    Ok(KlmsRun {
        output: stream_in.with_samples(out)?,
        predictions,
        residuals,
        dictionary_len: dict.len(),
    })
}
