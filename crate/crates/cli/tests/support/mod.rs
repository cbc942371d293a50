//! Independent reference computations. Nothing here calls the library routine
//! it is used to check.

use std::f64::consts::PI;

use num_complex::Complex64;

/// `x[t] = N^-1/2 sum X[n] e^{-j 2 pi n t / N}` by direct summation.
pub fn direct_idft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|t| {
            x.iter()
                .enumerate()
                .map(|(k, v)| {
                    v * Complex64::from_polar(1.0, -2.0 * PI * (k * t % n) as f64 / n as f64)
                })
                .sum::<Complex64>()
                / (n as f64).sqrt()
        })
        .collect()
}

pub fn direct_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, v)| {
                    v * Complex64::from_polar(1.0, 2.0 * PI * (k * t % n) as f64 / n as f64)
                })
                .sum::<Complex64>()
                / (n as f64).sqrt()
        })
        .collect()
}

/// `max |x|^2 / mean |x|^2` by an explicit scan.
pub fn brute_papr(x: &[Complex64]) -> f64 {
    let mut peak = 0.0;
    let mut total = 0.0;
    for s in x {
        let p = s.re * s.re + s.im * s.im;
        if p > peak {
            peak = p;
        }
        total += p;
    }
    peak / (total / x.len() as f64)
}

/// Gaussian tail by composite Simpson quadrature of the density on `[x, x + 40]`.
pub fn q_quadrature(x: f64) -> f64 {
    let (a, b, steps) = (x, x + 40.0, 400_000);
    let h = (b - a) / steps as f64;
    let f = |t: f64| (-t * t / 2.0).exp() / (2.0 * PI).sqrt();
    let mut s = f(a) + f(b);
    for i in 1..steps {
        let t = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(t);
    }
    s * h / 3.0
}

/// Gray-coded square 16-QAM bit-error probability from nearest-neighbour decision regions.
pub fn qam16_ber(ebn0_db: f64) -> f64 {
    // a = half level spacing over the noise deviation, unit-energy constellation
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    let a = (0.8 * ebn0).sqrt();
    let q = q_quadrature;
    (3.0 * q(a) + 2.0 * q(3.0 * a) - q(5.0 * a)) / 4.0
}

/// O(n^2) kernel LMS straight from the definitions: the prediction at `n` is
/// `eta * sum r_i k(x_i, x_n)` over the last `budget` earlier samples and
/// `r_n = v_n - prediction`.
pub fn direct_klms(
    inputs: &[Vec<f64>],
    desired: &[f64],
    eta: f64,
    width: f64,
    budget: usize,
) -> (Vec<f64>, Vec<f64>) {
    let k = |a: &[f64], b: &[f64]| {
        let d2: f64 = a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum();
        (-d2 / (2.0 * width * width)).exp()
    };
    let mut pred = Vec::new();
    let mut res: Vec<f64> = Vec::new();
    for n in 0..inputs.len() {
        let lo = n.saturating_sub(budget);
        let p = eta
            * (lo..n)
                .map(|i| res[i] * k(&inputs[i], &inputs[n]))
                .sum::<f64>();
        pred.push(p);
        res.push(desired[n] - p);
    }
    (pred, res)
}

/// Tap vectors `[s[n], s[n-1], ..]`, zero before the start.
pub fn taps(s: &[f64], dim: usize) -> Vec<Vec<f64>> {
    (0..s.len())
        .map(|n| {
            (0..dim)
                .map(|k| if n >= k { s[n - k] } else { 0.0 })
                .collect()
        })
        .collect()
}

/// Fraction of a sequence's energy inside `|f| <= w`, from the sinc-kernel
/// quadratic form `sum_mn v_m v_n sin(2 pi w (m - n)) / (pi (m - n))`.
pub fn band_concentration(v: &[f64], w: f64) -> f64 {
    let mut num = 0.0;
    for (m, a) in v.iter().enumerate() {
        for (n, b) in v.iter().enumerate() {
            let d = m as f64 - n as f64;
            let kern = if m == n {
                2.0 * w
            } else {
                (2.0 * PI * w * d).sin() / (PI * d)
            };
            num += a * b * kern;
        }
    }
    num / v.iter().map(|x| x * x).sum::<f64>()
}

/// `|| T v - lambda v || / || v ||` for the DPSS tridiagonal matrix.
pub fn dpss_residual(v: &[f64], nw: f64, lambda: f64) -> f64 {
    let n = v.len();
    let c = (2.0 * PI * nw / n as f64).cos();
    let mut r2 = 0.0;
    for i in 0..n {
        let half = (n as f64 - 1.0) / 2.0 - i as f64;
        let mut tv = half * half * c * v[i];
        if i > 0 {
            tv += (i as f64) * (n - i) as f64 / 2.0 * v[i - 1];
        }
        if i + 1 < n {
            tv += (i + 1) as f64 * (n - i - 1) as f64 / 2.0 * v[i + 1];
        }
        r2 += (tv - lambda * v[i]).powi(2);
    }
    (r2 / v.iter().map(|x| x * x).sum::<f64>()).sqrt()
}
