//! Rate-1/2 zero-tail convolutional code and its hard-decision Viterbi decoder.
//!
//! Register convention: bit `K-1` of the shift register holds the current input,
//! bit 0 the oldest. Each output bit is the parity of `register & generator`,
//! with generators written in octal as usual (133/171 for the default `K = 7` code).

use serde::{Deserialize, Serialize};

use super::BitBlock;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ZeroTail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpec {
    #[serde(default = "CodeSpec::default_k")]
    pub constraint_length: u32,
    /// Generator polynomials as octal literals, e.g. `[0o133, 0o171]`.
    #[serde(default = "CodeSpec::default_generators")]
    pub generators: [u32; 2],
    #[serde(default = "CodeSpec::default_termination")]
    pub termination: Termination,
}

impl Default for CodeSpec {
    fn default() -> Self {
        Self {
            constraint_length: Self::default_k(),
            generators: Self::default_generators(),
            termination: Termination::ZeroTail,
        }
    }
}

impl CodeSpec {
    fn default_k() -> u32 {
        7
    }

    fn default_generators() -> [u32; 2] {
        [0o133, 0o171]
    }

    fn default_termination() -> Termination {
        Termination::ZeroTail
    }

    /// Code rate numerator/denominator. Only rate 1/2 is supported.
    pub fn rate(&self) -> (u32, u32) {
        (1, 2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=16).contains(&self.constraint_length) {
            return Err(Error::param(
                "constraint_length",
                format!("must be in 2..=16, got {}", self.constraint_length),
            ));
        }
        for g in self.generators {
            if g == 0 || g >> self.constraint_length != 0 {
                return Err(Error::param(
                    "generators",
                    format!(
                        "polynomial {g:o} must be non-zero with degree < K = {}",
                        self.constraint_length
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Coded length for a message of `message_len` bits.
    pub fn encoded_len(&self, message_len: usize) -> usize {
        2 * (message_len + self.constraint_length as usize - 1)
    }

    fn outputs(&self, register: u32) -> (u8, u8) {
        (
            ((register & self.generators[0]).count_ones() & 1) as u8,
            ((register & self.generators[1]).count_ones() & 1) as u8,
        )
    }
}

pub fn conv_encode(bits: &BitBlock, code: &CodeSpec) -> Result<BitBlock> {
    code.validate()?;
    if bits.is_empty() {
        return Err(Error::param("bits", "cannot encode an empty message"));
    }
    let k = code.constraint_length;
    let tail = (k - 1) as usize;
    let mut register = 0u32;
    let mut out = Vec::with_capacity(code.encoded_len(bits.len()));
    for &b in bits.bits().iter().chain(std::iter::repeat_n(&0u8, tail)) {
        register = (register >> 1) | ((b as u32) << (k - 1));
        let (c0, c1) = code.outputs(register);
        out.push(c0);
        out.push(c1);
    }
    Ok(BitBlock::from_raw(out))
}

/// Maximum-likelihood hard-decision decoding over the zero-terminated trellis.
/// Ties between survivors resolve to the lower predecessor state.
pub fn viterbi_decode(bits: &BitBlock, code: &CodeSpec) -> Result<BitBlock> {
    code.validate()?;
    let k = code.constraint_length as usize;
    let tail = k - 1;
    if !bits.len().is_multiple_of(2) || bits.len() < 2 * (tail + 1) {
        return Err(Error::param(
            "bits",
            format!(
                "coded length {} is not 2*(m + {tail}) for any m >= 1",
                bits.len()
            ),
        ));
    }
    let steps = bits.len() / 2;
    let n_states = 1usize << tail;
    let received = bits.bits();

    // state = the K-1 most recent inputs, newest in bit K-2
    let mut metric = vec![u32::MAX; n_states];
    metric[0] = 0;
    let mut decisions: Vec<Vec<u8>> = Vec::with_capacity(steps);
    let mut next = vec![u32::MAX; n_states];

    for step in 0..steps {
        let r = (received[2 * step], received[2 * step + 1]);
        next.iter_mut().for_each(|m| *m = u32::MAX);
        let mut choice = vec![0u8; n_states];
        for (prev, &pm) in metric.iter().enumerate() {
            if pm == u32::MAX {
                continue;
            }
            for input in 0..2u32 {
                if step >= steps - tail && input == 1 {
                    continue;
                }
                let ns = new_state(prev, input, tail);
                let out = branch_output(code, prev, input, k);
                let cost = pm + (out.0 != r.0) as u32 + (out.1 != r.1) as u32;
                // keep the lower predecessor on ties: predecessors are visited in
                // ascending order, so only a strict improvement replaces
                if cost < next[ns] {
                    next[ns] = cost;
                    choice[ns] = (prev & 1) as u8;
                }
            }
        }
        std::mem::swap(&mut metric, &mut next);
        decisions.push(choice);
    }

    // trace back from the all-zero state
    let mut state = 0usize;
    let mut decoded = vec![0u8; steps];
    for step in (0..steps).rev() {
        decoded[step] = ((state >> (tail - 1)) & 1) as u8;
        let dropped = decisions[step][state] as usize;
        state = ((state << 1) & (n_states - 1)) | dropped;
    }
    decoded.truncate(steps - tail);
    Ok(BitBlock::from_raw(decoded))
}

fn new_state(prev: usize, input: u32, tail: usize) -> usize {
    (prev >> 1) | ((input as usize) << (tail - 1))
}

fn branch_output(code: &CodeSpec, prev: usize, input: u32, k: usize) -> (u8, u8) {
    code.outputs((input << (k - 1)) | prev as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::RandomStream;

    fn block(bits: &[u8]) -> BitBlock {
        BitBlock::new(bits.to_vec()).unwrap()
    }

    #[test]
    fn zero_message_encodes_to_zeros() {
        let out = conv_encode(&block(&[0; 8]), &CodeSpec::default()).unwrap();
        assert_eq!(out.len(), 28);
        assert!(out.bits().iter().all(|&b| b == 0));
    }

    #[test]
    fn impulse_response_matches_generators() {
        // 133 = 1 011 011, 171 = 1 111 001 read from bit 6 down to bit 0
        let expected = [1, 1, 0, 1, 1, 1, 1, 1, 0, 0, 1, 0, 1, 1];
        let out = conv_encode(&block(&[1, 0, 0, 0, 0, 0, 0]), &CodeSpec::default()).unwrap();
        assert_eq!(out.len(), 26);
        assert_eq!(&out.bits()[..14], &expected);
        assert!(out.bits()[14..].iter().all(|&b| b == 0));
    }

    #[test]
    fn noiseless_roundtrip() {
        let code = CodeSpec::default();
        let mut rng = RandomStream::new(5);
        for len in [1, 2, 7, 96, 200] {
            let msg = BitBlock::new(rng.bits(len)).unwrap();
            let decoded = viterbi_decode(&conv_encode(&msg, &code).unwrap(), &code).unwrap();
            assert_eq!(decoded, msg);
        }
    }

    #[test]
    fn corrects_any_single_flip() {
        let code = CodeSpec::default();
        let mut rng = RandomStream::new(11);
        for _ in 0..200 {
            let msg = BitBlock::new(rng.bits(96)).unwrap();
            let mut coded = conv_encode(&msg, &code).unwrap().into_bits();
            let at = rng.index(coded.len());
            coded[at] ^= 1;
            assert_eq!(
                viterbi_decode(&BitBlock::new(coded).unwrap(), &code).unwrap(),
                msg
            );
        }
    }

    #[test]
    fn inconsistent_lengths_rejected() {
        let code = CodeSpec::default();
        assert!(viterbi_decode(&block(&[0; 12]), &code).is_err());
        assert!(viterbi_decode(&block(&[0; 15]), &code).is_err());
        assert!(conv_encode(&BitBlock::new(vec![]).unwrap(), &code).is_err());
    }

    #[test]
    fn generator_degree_checked() {
        let bad = CodeSpec {
            generators: [0o333, 0o171],
            ..CodeSpec::default()
        };
        assert!(bad.validate().is_err());
    }
}
