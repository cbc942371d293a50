use num_complex::Complex64;

use crate::error::{ensure_len, Error, Result};
use crate::signal::TimeSeries;

/// Complex gain of `signal` onto `reference`: `sum x conj(r) / sum |r|^2`.
pub fn correlation(signal: &TimeSeries, reference: &TimeSeries) -> Result<Complex64> {
    ensure_len(reference.len(), signal.len())?;
    let e = reference.energy();
    if e == 0.0 {
        return Err(Error::ZeroEnergy("matched-filter reference"));
    }
    let acc: Complex64 = signal
        .samples()
        .iter()
        .zip(reference.samples())
        .map(|(x, r)| x * r.conj())
        .sum();
    Ok(acc / e)
}

/// Remove the common phase of `signal` relative to `reference`.
pub fn matched_filter_phase(signal: &TimeSeries, reference: &TimeSeries) -> Result<TimeSeries> {
    let rho = correlation(signal, reference)?;
    if rho.im == 0.0 && rho.re >= 0.0 {
        return Ok(signal.clone());
    }
    let rot = Complex64::from_polar(1.0, -rho.arg());
    signal.with_samples(signal.samples().iter().map(|x| x * rot).collect())
}
