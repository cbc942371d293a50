use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::{TimeSeries, WindowCoefficients};

/// Peak positions considered by [`peak_window_clip`]: `|x[p]| > A`, at least
/// the left neighbour and strictly above the right one (circular).
pub fn local_peaks(samples: &[Complex64], amplitude: f64) -> Vec<usize> {
    let n = samples.len();
    let mag: Vec<f64> = samples.iter().map(|s| s.norm()).collect();
    (0..n)
        .filter(|&p| {
            let (l, r) = (mag[(p + n - 1) % n], mag[(p + 1) % n]);
            mag[p] > amplitude && (n == 1 || (mag[p] >= l && mag[p] > r))
        })
        .collect()
}

/// Windowed peak attenuation. Around every local peak above `A` the signal is
/// scaled by `1 - alpha * w[n - p + half]`, with `alpha` chosen so the peak
/// itself lands on `A`. Where the spans of several peaks meet, the smallest
/// factor wins. The signal is treated as one period of a cyclic sequence.
pub fn peak_window_clip(
    signal: &TimeSeries,
    amplitude: f64,
    window: &WindowCoefficients,
) -> Result<TimeSeries> {
    Ok(peak_window_clip_counted(signal, amplitude, window)?.0)
}

pub(crate) fn peak_window_clip_counted(
    signal: &TimeSeries,
    amplitude: f64,
    window: &WindowCoefficients,
) -> Result<(TimeSeries, usize)> {
    if amplitude.is_nan() || amplitude <= 0.0 {
        return Err(Error::param(
            "A",
            format!("clip amplitude must be positive, got {amplitude}"),
        ));
    }
    if window.len().is_multiple_of(2) {
        return Err(Error::param(
            "window",
            format!("need an odd length for centring, got {}", window.len()),
        ));
    }
    let center = window.center();
    if center.is_nan() || center <= 0.0 {
        return Err(Error::param("window", "centre sample must be positive"));
    }
    let x = signal.samples();
    let n = x.len();
    let half = (window.len() - 1) / 2;
    let peaks = local_peaks(x, amplitude);
    if peaks.is_empty() {
        return Ok((signal.clone(), 0));
    }
    let mut factor = vec![1.0f64; n];
    for &p in &peaks {
        let alpha = (1.0 - amplitude / x[p].norm()) / center;
        for (k, &w) in window.samples.iter().enumerate() {
            let idx = (p + n * (half / n + 1) + k - half) % n;
            let f = (1.0 - alpha * w).clamp(0.0, 1.0);
            if f < factor[idx] {
                factor[idx] = f;
            }
        }
    }
    let out = x.iter().zip(&factor).map(|(s, f)| s * *f).collect();
    Ok((signal.with_samples(out)?, peaks.len()))
}
