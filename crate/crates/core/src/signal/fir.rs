use num_complex::Complex64;

use super::TimeSeries;
use crate::error::{Error, Result};

/// Linear-phase FIR filter with the `(len - 1) / 2` group delay removed, so the
/// output is aligned with the input and has the same length. Samples outside
/// the input are treated as zero.
pub fn fir_filter(signal: &TimeSeries, taps: &[f64]) -> Result<TimeSeries> {
    if taps.is_empty() {
        return Err(Error::param("taps", "tap set is empty"));
    }
    if taps.len().is_multiple_of(2) {
        return Err(Error::param(
            "taps",
            format!("need an odd (linear-phase) length, got {}", taps.len()),
        ));
    }
    if let Some(i) = taps.iter().position(|t| !t.is_finite()) {
        return Err(Error::param("taps", format!("tap {i} is not finite")));
    }
    let x = signal.samples();
    let delay = (taps.len() - 1) / 2;
    let n = x.len() as isize;
    let out = (0..x.len())
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &tap) in taps.iter().enumerate() {
                let j = i as isize + delay as isize - k as isize;
                if (0..n).contains(&j) {
                    acc += x[j as usize] * tap;
                }
            }
            acc
        })
        .collect();
    signal.with_samples(out)
}
