//! Gray-mapped, unit-energy 16-QAM.
//!
//! Bits `b0 b1` select the in-phase level and `b2 b3` the quadrature level,
//! each with the per-axis Gray order `00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3`
//! scaled by `1/sqrt(10)`.

use num_complex::Complex64;

use super::BitBlock;
use crate::error::{Error, Result};

const SCALE: f64 = 0.31622776601683794; // 1 / sqrt(10)

fn level(b0: u8, b1: u8) -> f64 {
    let l = match (b0, b1) {
        (0, 0) => -3.0,
        (0, 1) => -1.0,
        (1, 1) => 1.0,
        _ => 3.0,
    };
    l * SCALE
}

/// Hard decision on one axis. Values on a decision boundary go to the
/// lexicographically smaller bit pair.
fn decide(v: f64) -> (u8, u8) {
    if v <= -2.0 * SCALE {
        (0, 0)
    } else if v <= 0.0 {
        (0, 1)
    } else if v < 2.0 * SCALE {
        (1, 1)
    } else {
        (1, 0)
    }
}

pub fn qam16_map(bits: &BitBlock) -> Result<Vec<Complex64>> {
    if !bits.len().is_multiple_of(4) {
        return Err(Error::param(
            "bits",
            format!("16-QAM needs a multiple of 4 bits, got {}", bits.len()),
        ));
    }
    Ok(bits
        .bits()
        .chunks_exact(4)
        .map(|c| Complex64::new(level(c[0], c[1]), level(c[2], c[3])))
        .collect())
}

pub fn qam16_demap(symbols: &[Complex64]) -> BitBlock {
    let mut bits = Vec::with_capacity(4 * symbols.len());
    for s in symbols {
        let (i0, i1) = decide(s.re);
        let (q0, q1) = decide(s.im);
        bits.extend_from_slice(&[i0, i1, q0, q1]);
    }
    BitBlock::from_raw(bits)
}
