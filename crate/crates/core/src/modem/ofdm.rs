use num_complex::Complex64;

use super::{
    assemble_frame, conv_encode, disassemble_frame, qam16_demap, qam16_map, viterbi_decode,
    BitBlock, FrameConfig,
};
use crate::error::{ensure_len, Error, Result};
use crate::signal::{extract_band, oversample, RandomStream, SpectrumVector, TimeSeries};

const PAD_KEY: u64 = 0x7061_645f_6669_6c6c;

/// One emitted OFDM symbol: the oversampled body plus a cyclic prefix that is,
/// by construction, the last `cp_len` body samples.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmSymbol {
    body: TimeSeries,
    cp_len: usize,
    pad_bits: usize,
}

impl OfdmSymbol {
    pub fn from_body(body: TimeSeries, cp_len: usize) -> Result<Self> {
        if cp_len > body.len() {
            return Err(Error::param(
                "cp_len",
                format!("prefix {cp_len} longer than body {}", body.len()),
            ));
        }
        Ok(Self {
            body,
            cp_len,
            pad_bits: 0,
        })
    }

    /// Split a received stream of `cp_len + body_len` samples.
    pub fn from_received(samples: &[Complex64], cfg: &FrameConfig) -> Result<Self> {
        let cp = cfg.cp_len();
        ensure_len(cp + cfg.body_len(), samples.len())?;
        let body = TimeSeries::new(
            samples[cp..].to_vec(),
            1.0 / cfg.oversampling as f64,
            cfg.oversampling,
        )?;
        Self::from_body(body, cp)
    }

    pub fn body(&self) -> &TimeSeries {
        &self.body
    }

    pub fn cyclic_prefix(&self) -> &[Complex64] {
        &self.body.samples()[self.body.len() - self.cp_len..]
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    /// Filler bits appended to the coded payload to fill the data bins.
    pub fn pad_bits(&self) -> usize {
        self.pad_bits
    }

    /// Prefix followed by body, as put on the channel.
    pub fn emitted(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.cp_len + self.body.len());
        out.extend_from_slice(self.cyclic_prefix());
        out.extend_from_slice(self.body.samples());
        out
    }

    pub fn emitted_len(&self) -> usize {
        self.cp_len + self.body.len()
    }
}

/// Oversample by `L` and attach a cyclic prefix of `round(cp_fraction * N * L)` samples.
pub fn modulate(spectrum: &SpectrumVector, cfg: &FrameConfig) -> Result<OfdmSymbol> {
    ensure_len(cfg.n_subcarriers, spectrum.len())?;
    let body = oversample(spectrum, cfg.oversampling)?;
    OfdmSymbol::from_body(body, cfg.cp_len())
}

/// Back to `N` subcarriers. The prefix is ignored.
pub fn demodulate(symbol: &OfdmSymbol, cfg: &FrameConfig) -> Result<SpectrumVector> {
    ensure_len(cfg.body_len(), symbol.body().len())?;
    ensure_len(cfg.cp_len(), symbol.cp_len())?;
    if symbol.body().oversampling() != cfg.oversampling {
        return Err(Error::param(
            "oversampling",
            "symbol was not produced at the configured factor",
        ));
    }
    extract_band(symbol.body(), cfg.n_subcarriers)
}

/// Payload bits to the frequency-domain frame: code, pad, map, place pilots.
///
/// Pad bits are pseudo-random, keyed by the payload itself, so unused data
/// bins carry average constellation energy and differ from frame to frame.
pub fn encode_payload(bits: &BitBlock, cfg: &FrameConfig) -> Result<SpectrumVector> {
    if bits.is_empty() {
        return Err(Error::param("bits", "payload is empty"));
    }
    ensure_len(cfg.payload_bits(), bits.len())?;
    let mut channel = if cfg.coding {
        conv_encode(bits, &cfg.code)?.into_bits()
    } else {
        bits.bits().to_vec()
    };
    let fill = cfg.capacity_bits().saturating_sub(channel.len());
    if fill > 0 {
        channel.extend(RandomStream::derived(PAD_KEY, &[bits.bits()]).bits(fill));
    }
    let symbols = qam16_map(&BitBlock::from_raw(channel))?;
    assemble_frame(&symbols, cfg)
}

/// Inverse of [`encode_payload`] by hard decisions.
pub fn decode_spectrum(spectrum: &SpectrumVector, cfg: &FrameConfig) -> Result<BitBlock> {
    let symbols = disassemble_frame(spectrum, cfg)?;
    let mut channel = qam16_demap(&symbols).into_bits();
    channel.truncate(cfg.coded_bits());
    let channel = BitBlock::from_raw(channel);
    if cfg.coding {
        viterbi_decode(&channel, &cfg.code)
    } else {
        Ok(channel)
    }
}

pub fn transmit_chain(bits: &BitBlock, cfg: &FrameConfig) -> Result<OfdmSymbol> {
    cfg.validate()?;
    let spectrum = encode_payload(bits, cfg)?;
    let mut symbol = modulate(&spectrum, cfg)?;
    symbol.pad_bits = cfg.pad_bits();
    Ok(symbol)
}

pub fn receive_chain(symbol: &OfdmSymbol, cfg: &FrameConfig) -> Result<BitBlock> {
    cfg.validate()?;
    decode_spectrum(&demodulate(symbol, cfg)?, cfg)
}
