use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::clip::{check_ratio, DEFAULT_CLIP_RATIO};
use super::klms::{klms_filter, KernelFilterConfig};
use super::matched::{correlation, matched_filter_phase};
use super::peak_window::peak_window_clip_counted;
use super::{SideInfo, StageOutcome};
use crate::error::{ensure_len, Error, Result};
use crate::modem::FrameConfig;
use crate::signal::{
    composite_window, flat_top_window_symmetric, oversample, slepian_window, SpectrumVector,
    TimeSeries, WindowCoefficients,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProposedConfig {
    /// Peak-window threshold `A = clip_ratio * RMS(input)`, shared by both windowing steps.
    pub clip_ratio: f64,
    pub window_nw: f64,
    /// Window span is `2 * half_length + 1`. Default `max(N*L/16, 3)`.
    pub window_half_length: Option<usize>,
    pub kernel: KernelFilterConfig,
}

impl Default for ProposedConfig {
    fn default() -> Self {
        Self {
            clip_ratio: DEFAULT_CLIP_RATIO,
            window_nw: 2.5,
            window_half_length: None,
            kernel: KernelFilterConfig::default(),
        }
    }
}

impl ProposedConfig {
    pub fn half_length(&self, body_len: usize) -> usize {
        self.window_half_length.unwrap_or((body_len / 16).max(3))
    }

    pub fn validate(&self, body_len: usize) -> Result<()> {
        check_ratio(self.clip_ratio)?;
        if self.window_half_length == Some(0) {
            return Err(Error::param("window_half_length", "must be at least 1"));
        }
        let len = 2 * self.half_length(body_len) + 1;
        if !(self.window_nw > 0.0 && self.window_nw < len as f64 / 2.0) {
            return Err(Error::param(
                "window_nw",
                format!(
                    "need 0 < NW < {} for a {len}-sample window, got {}",
                    len as f64 / 2.0,
                    self.window_nw
                ),
            ));
        }
        self.kernel.validate()
    }

    /// The flat-top and Slepian windows for a body of `body_len` samples.
    pub fn windows(&self, body_len: usize) -> Result<(WindowCoefficients, WindowCoefficients)> {
        let len = 2 * self.half_length(body_len) + 1;
        Ok((
            flat_top_window_symmetric(len)?,
            slepian_window(len, self.window_nw)?,
        ))
    }
}

/// Peak windowing with the renormalised product of the two windows.
pub fn apply_slepian_flat_top(
    signal: &TimeSeries,
    flat_top: &WindowCoefficients,
    slepian: &WindowCoefficients,
    amplitude: f64,
) -> Result<TimeSeries> {
    let w = composite_window(flat_top, slepian)?;
    Ok(peak_window_clip_counted(signal, amplitude, &w)?.0)
}

/// Peak windowing, pilot-referenced phase correction, kernel-filter magnitude
/// restoration, then a second windowing pass at the same threshold.
///
/// The kernel filter learns `|x0| - |x|`, the magnitude removed by the first
/// pass, from tap-delay magnitudes of the corrected signal; its prediction is
/// added back to the envelope with the phase left alone.
///
/// Diagnostics: `clip_amplitude`, `peaks_windowed`, `phase_correction_rad`,
/// `kernel_dictionary`, `kernel_mean_correction`, `final_peaks_windowed`.
pub fn proposed_pipeline(
    spectrum: &SpectrumVector,
    cfg: &ProposedConfig,
    frame_cfg: &FrameConfig,
) -> Result<StageOutcome> {
    ensure_len(frame_cfg.n_subcarriers, spectrum.len())?;
    let body_len = frame_cfg.body_len();
    cfg.validate(body_len)?;
    let (flat_top, slepian) = cfg.windows(body_len)?;
    let composite = composite_window(&flat_top, &slepian)?;

    let x0 = oversample(spectrum, frame_cfg.oversampling)?;
    let amplitude = cfg.clip_ratio * x0.rms();
    if amplitude == 0.0 {
        return Err(Error::ZeroEnergy(
            "cannot set a clip level for a zero signal",
        ));
    }
    let (x1, peaks) = peak_window_clip_counted(&x0, amplitude, &composite)?;

    let reference = oversample(&frame_cfg.pilot_spectrum()?, frame_cfg.oversampling)?;
    let rho = correlation(&x1, &reference)?;
    let x2 = matched_filter_phase(&x1, &reference)?;

    let desired = x2.with_samples(
        x0.samples()
            .iter()
            .zip(x2.samples())
            .map(|(a, b)| Complex64::new(a.norm() - b.norm(), 0.0))
            .collect(),
    )?;
    let run = klms_filter(&x2, &desired, &cfg.kernel)?;
    let delta = run.output_block();
    let x3 = x2.with_samples(
        x2.samples()
            .iter()
            .zip(delta)
            .map(|(&s, d)| {
                let m = s.norm();
                if m == 0.0 {
                    s
                } else {
                    s * ((m + d.re).max(0.0) / m)
                }
            })
            .collect(),
    )?;
    let (x4, final_peaks) = peak_window_clip_counted(&x3, amplitude, &composite)?;

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("clip_amplitude".to_owned(), amplitude);
    diagnostics.insert("peaks_windowed".to_owned(), peaks as f64);
    diagnostics.insert(
        "phase_correction_rad".to_owned(),
        if rho.norm() == 0.0 { 0.0 } else { -rho.arg() },
    );
    diagnostics.insert("kernel_dictionary".to_owned(), run.dictionary_len as f64);
    diagnostics.insert(
        "kernel_mean_correction".to_owned(),
        delta.iter().map(|d| d.re).sum::<f64>() / delta.len() as f64,
    );
    diagnostics.insert("final_peaks_windowed".to_owned(), final_peaks as f64);
    Ok(StageOutcome {
        signal: x4,
        side_info: SideInfo::None,
        diagnostics,
    })
}
