//! PAPR-reduction stages. Each one takes a frequency-domain frame and returns
//! the oversampled time-domain body to transmit plus whatever the receiver
//! needs to undo it.

mod clip;
mod klms;
mod matched;
mod peak_window;
mod proposed;
mod pts;
mod slm;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modem::FrameConfig;
use crate::signal::{band_mask, oversample, SpectrumVector, TimeSeries};

pub use clip::{clip, clip_and_filter, ClipConfig, ClipFilter, DEFAULT_CLIP_RATIO};
pub use klms::{embed, klms_filter, Kernel, KernelFilterConfig, KlmsRun, TapFeature};
pub use matched::{correlation, matched_filter_phase};
pub use peak_window::{local_peaks, peak_window_clip};
pub use proposed::{apply_slepian_flat_top, proposed_pipeline, ProposedConfig};
pub use pts::{
    pts_restore, pts_transform, pts_weights, Partition, PtsConfig, PtsSearch, DEFAULT_SEARCH_CAP,
};
pub use slm::{slm_phase_sequences, slm_restore, slm_transform, SlmConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideInfo {
    None,
    SlmIndex(usize),
    PtsPhases(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageOutcome {
    pub signal: TimeSeries,
    pub side_info: SideInfo,
    pub diagnostics: BTreeMap<String, f64>,
}

/// {+1, -1, +j, -j}
pub(crate) fn quarter_turns() -> Vec<Complex64> {
    vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
    ]
}

pub(crate) fn check_alphabet(name: &'static str, set: &[Complex64]) -> Result<()> {
    if set.is_empty() {
        return Err(Error::param(name, "phase set is empty"));
    }
    match set.iter().find(|p| (p.norm() - 1.0).abs() > 1e-12) {
        Some(p) => Err(Error::param(name, format!("{p} is not unimodular"))),
        None => Ok(()),
    }
}

/// One configured stage, as written in an experiment file (`kind = "..."`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StageConfig {
    None,
    Clip(ClipConfig),
    Slm(SlmConfig),
    Pts(PtsConfig),
    Proposed(ProposedConfig),
}

impl StageConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            StageConfig::None => "none",
            StageConfig::Clip(_) => "clip",
            StageConfig::Slm(_) => "slm",
            StageConfig::Pts(_) => "pts",
            StageConfig::Proposed(_) => "proposed",
        }
    }

    /// Default settings for a stage kind name.
    pub fn default_for(kind: &str) -> Option<Self> {
        Some(match kind {
            "none" => StageConfig::None,
            "clip" => StageConfig::Clip(ClipConfig::default()),
            "slm" => StageConfig::Slm(SlmConfig::default()),
            "pts" => StageConfig::Pts(PtsConfig::default()),
            "proposed" => StageConfig::Proposed(ProposedConfig::default()),
            _ => return None,
        })
    }

    pub fn validate(&self, frame: &FrameConfig) -> Result<()> {
        match self {
            StageConfig::None => Ok(()),
            StageConfig::Clip(c) => c.validate(),
            StageConfig::Slm(c) => c.validate(),
            StageConfig::Pts(c) => {
                c.validate(frame.n_subcarriers)?;
                c.resolved_search().map(|_| ())
            }
            StageConfig::Proposed(c) => c.validate(frame.body_len()),
        }
    }

    /// Frame spectrum to transmitted body.
    pub fn apply(&self, spectrum: &SpectrumVector, frame: &FrameConfig) -> Result<StageOutcome> {
        let l = frame.oversampling;
        match self {
            StageConfig::None => Ok(StageOutcome {
                signal: oversample(spectrum, l)?,
                side_info: SideInfo::None,
                diagnostics: BTreeMap::new(),
            }),
            StageConfig::Clip(c) => {
                let x = oversample(spectrum, l)?;
                clip_and_filter(&x, c, &band_mask(spectrum.len(), l))
            }
            StageConfig::Slm(c) => slm_transform(spectrum, c, l),
            StageConfig::Pts(c) => pts_transform(spectrum, c, l),
            StageConfig::Proposed(c) => proposed_pipeline(spectrum, c, frame),
        }
    }

    /// Undo the stage on a received spectrum using the side information.
    pub fn restore(
        &self,
        spectrum: &SpectrumVector,
        side_info: &SideInfo,
    ) -> Result<SpectrumVector> {
        match (self, side_info) {
            (StageConfig::Slm(c), SideInfo::SlmIndex(m)) => slm_restore(spectrum, c, *m),
            (StageConfig::Pts(c), SideInfo::PtsPhases(p)) => pts_restore(spectrum, c, p),
            (
                StageConfig::None | StageConfig::Clip(_) | StageConfig::Proposed(_),
                SideInfo::None,
            ) => Ok(spectrum.clone()),
            _ => Err(Error::param(
                "side_info",
                format!("does not belong to a `{}` stage", self.kind()),
            )),
        }
    }
}
