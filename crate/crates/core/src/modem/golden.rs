//! Golden-vector files for cross-implementation conformance.
//!
//! Bit vectors are one line of hex, most significant bit of each nibble first,
//! after a `# bits=<count>` header; the final nibble is zero-padded. Complex
//! vectors are CSV with one `re,im` pair per line, printed in Rust's shortest
//! round-trip decimal form. Lines starting with `#` are comments.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::BitBlock;
use crate::error::{Error, Result};

pub fn format_hex_bits(bits: &BitBlock) -> String {
    let mut hex = String::with_capacity(bits.len() / 4 + 1);
    for nibble in bits.bits().chunks(4) {
        let v = nibble
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, b)| acc | (b << (3 - i)));
        write!(hex, "{v:x}").expect("writing to a String");
    }
    format!("# bits={}\n{hex}\n", bits.len())
}

pub fn parse_hex_bits(text: &str) -> Result<BitBlock> {
    let mut count = None;
    let mut bits = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(n) = rest.trim().strip_prefix("bits=") {
                count = Some(n.parse::<usize>().map_err(|e| Error::Golden {
                    line: i + 1,
                    reason: e.to_string(),
                })?);
            }
            continue;
        }
        for c in line.chars() {
            let v = c.to_digit(16).ok_or_else(|| Error::Golden {
                line: i + 1,
                reason: format!("`{c}` is not a hex digit"),
            })?;
            bits.extend((0..4).rev().map(|s| ((v >> s) & 1) as u8));
        }
    }
    if let Some(n) = count {
        if n > bits.len() || bits.len() - n >= 4 {
            return Err(Error::Golden {
                line: 1,
                reason: format!("header declares {n} bits but data holds {}", bits.len()),
            });
        }
        bits.truncate(n);
    }
    Ok(BitBlock::from_raw(bits))
}

pub fn format_complex_csv(values: &[Complex64]) -> String {
    let mut out = String::new();
    for v in values {
        writeln!(out, "{},{}", v.re, v.im).expect("writing to a String");
    }
    out
}

pub fn parse_complex_csv(text: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: String| Error::Golden {
            line: i + 1,
            reason,
        };
        let (re, im) = line
            .split_once(',')
            .ok_or_else(|| err("expected `re,im`".into()))?;
        let re = re.trim().parse::<f64>().map_err(|e| err(e.to_string()))?;
        let im = im.trim().parse::<f64>().map_err(|e| err(e.to_string()))?;
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

pub fn read_hex_bits(path: &Path) -> Result<BitBlock> {
    parse_hex_bits(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_hex_bits(path: &Path, bits: &BitBlock) -> Result<()> {
    std::fs::write(path, format_hex_bits(bits)).map_err(|e| Error::io(path, e))
}

pub fn read_complex_csv(path: &Path) -> Result<Vec<Complex64>> {
    parse_complex_csv(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_complex_csv(path: &Path, values: &[Complex64]) -> Result<()> {
    std::fs::write(path, format_complex_csv(values)).map_err(|e| Error::io(path, e))
}
