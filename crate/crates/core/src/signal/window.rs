//! Flat-top and Slepian (DPSS) window design.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Five-term flat-top cosine coefficients `a_0 .. a_4`.
///
/// The third coefficient is 0.27263158, not the 0.277263158 of the common
/// textbook flat-top; the values here are used as given.
pub const FLAT_TOP_COEFFICIENTS: [f64; 5] =
    [0.215578847, 0.416631, 0.27263158, 0.083578947, 0.006947368];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    FlatTop,
    Slepian,
    Composite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowCoefficients {
    pub kind: WindowKind,
    /// Cosine coefficients, flat-top only.
    pub a: Option<[f64; 5]>,
    pub samples: Vec<f64>,
    pub params: BTreeMap<String, f64>,
}

impl WindowCoefficients {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Value at the centre index `(len - 1) / 2`.
    pub fn center(&self) -> f64 {
        self.samples[(self.len() - 1) / 2]
    }

    /// An all-ones window of the given length (multiplicative identity for [`composite_window`]).
    pub fn ones(len: usize) -> Self {
        Self {
            kind: WindowKind::Slepian,
            a: None,
            samples: vec![1.0; len],
            params: BTreeMap::new(),
        }
    }
}

fn cosine_sum(len: usize, period: f64) -> Vec<f64> {
    (0..len)
        .map(|n| {
            let w = 2.0 * PI * n as f64 / period;
            FLAT_TOP_COEFFICIENTS
                .iter()
                .enumerate()
                .map(|(k, &a)| if k % 2 == 0 { a } else { -a } * (k as f64 * w).cos())
                .sum()
        })
        .collect()
}

fn flat_top(len: usize, period: f64) -> WindowCoefficients {
    WindowCoefficients {
        kind: WindowKind::FlatTop,
        a: Some(FLAT_TOP_COEFFICIENTS),
        samples: cosine_sum(len, period),
        params: BTreeMap::new(),
    }
}

/// Periodic flat-top window `w(n) = sum_k (-1)^k a_k cos(2 pi k n / N)`.
/// Symmetric in the sense `w[n] == w[(N - n) mod N]`, with its peak at `N/2`.
pub fn flat_top_window(len: usize) -> Result<WindowCoefficients> {
    if len < 2 {
        return Err(Error::param(
            "length_N",
            format!("flat-top window needs N >= 2, got {len}"),
        ));
    }
    Ok(flat_top(len, len as f64))
}

/// Symmetric flat-top (`period = N - 1`), `w[n] == w[N-1-n]`, peak at the centre
/// sample for odd `N`. This is the form used for centred peak windowing.
pub fn flat_top_window_symmetric(len: usize) -> Result<WindowCoefficients> {
    if len < 2 {
        return Err(Error::param(
            "length_N",
            format!("flat-top window needs N >= 2, got {len}"),
        ));
    }
    Ok(flat_top(len, (len - 1) as f64))
}

/// The symmetric tridiagonal matrix whose dominant eigenvector is the order-0 DPSS.
pub(crate) fn dpss_matrix(len: usize, half_bandwidth: f64) -> DMatrix<f64> {
    let w = half_bandwidth / len as f64;
    let c = (2.0 * PI * w).cos();
    let mut m = DMatrix::zeros(len, len);
    for n in 0..len {
        let d = (len as f64 - 1.0 - 2.0 * n as f64) / 2.0;
        m[(n, n)] = d * d * c;
        if n + 1 < len {
            let e = (n + 1) as f64 * (len - n - 1) as f64 / 2.0;
            m[(n, n + 1)] = e;
            m[(n + 1, n)] = e;
        }
    }
    m
}

/// Order-0 discrete prolate spheroidal sequence, scaled so its maximum is 1.
///
/// `params` records `time_half_bandwidth` and the matrix `eigenvalue`.
pub fn slepian_window(len: usize, time_half_bandwidth: f64) -> Result<WindowCoefficients> {
    if len < 2 {
        return Err(Error::param(
            "length_N",
            format!("Slepian window needs N >= 2, got {len}"),
        ));
    }
    if !(time_half_bandwidth > 0.0 && time_half_bandwidth < len as f64 / 2.0) {
        return Err(Error::param(
            "time_half_bandwidth_NW",
            format!(
                "need 0 < NW < N/2 = {}, got {time_half_bandwidth}",
                len as f64 / 2.0
            ),
        ));
    }
    let matrix = dpss_matrix(len, time_half_bandwidth);
    let eig = SymmetricEigen::new(matrix.clone());
    let (top, _) =
        eig.eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| {
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            });
    let v = eig.eigenvectors.column(top);
    // the exact eigenvector is symmetric; remove solver round-off
    let mut samples: Vec<f64> = (0..len).map(|n| 0.5 * (v[n] + v[len - 1 - n])).collect();
    let mid = 0.5 * (samples[(len - 1) / 2] + samples[len / 2]);
    let peak = samples.iter().map(|s| s.abs()).fold(0.0, f64::max);
    let scale = if mid < 0.0 { -1.0 / peak } else { 1.0 / peak };
    samples.iter_mut().for_each(|s| *s *= scale);

    let vec = nalgebra::DVector::from_column_slice(&samples);
    let eigenvalue = vec.dot(&(&matrix * &vec)) / vec.dot(&vec);
    let mut params = BTreeMap::new();
    params.insert("time_half_bandwidth".to_owned(), time_half_bandwidth);
    params.insert("eigenvalue".to_owned(), eigenvalue);
    Ok(WindowCoefficients {
        kind: WindowKind::Slepian,
        a: None,
        samples,
        params,
    })
}

/// Pointwise product of two equal-length windows, renormalised so the centre
/// sample is 1.
pub fn composite_window(
    flat_top: &WindowCoefficients,
    slepian: &WindowCoefficients,
) -> Result<WindowCoefficients> {
    crate::error::ensure_len(flat_top.len(), slepian.len())?;
    let mut samples: Vec<f64> = flat_top
        .samples
        .iter()
        .zip(&slepian.samples)
        .map(|(a, b)| a * b)
        .collect();
    let center = samples[(samples.len() - 1) / 2];
    if center.abs() < f64::EPSILON {
        return Err(Error::param(
            "window",
            "composite window has a zero centre sample",
        ));
    }
    samples.iter_mut().for_each(|s| *s /= center);
    let mut params = slepian.params.clone();
    params.extend(flat_top.params.iter().map(|(k, v)| (k.clone(), *v)));
    Ok(WindowCoefficients {
        kind: WindowKind::Composite,
        a: flat_top.a,
        samples,
        params,
    })
}
