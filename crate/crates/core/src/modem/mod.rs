//! Transmit and receive chain: convolutional coding, 16-QAM, pilot
//! placement and cyclic-prefix OFDM modulation.

mod code;
mod frame;
pub mod golden;
mod ofdm;
mod qam;

pub use code::{conv_encode, viterbi_decode, CodeSpec, Termination};
pub use frame::{assemble_frame, disassemble_frame, FrameConfig, DEFAULT_PAYLOAD_BITS};
pub use ofdm::{
    decode_spectrum, demodulate, encode_payload, modulate, receive_chain, transmit_chain,
    OfdmSymbol,
};
pub use qam::{qam16_demap, qam16_map};

use crate::error::{Error, Result};

/// An ordered block of bits, each 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitBlock(Vec<u8>);

impl BitBlock {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(i) = bits.iter().position(|&b| b > 1) {
            return Err(Error::param(
                "bits",
                format!("value {} at index {i} is not a bit", bits[i]),
            ));
        }
        Ok(Self(bits))
    }

    pub(crate) fn from_raw(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }
}
