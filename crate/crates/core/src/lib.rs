//! Baseband OFDM simulation for comparing peak-to-average power ratio (PAPR)
//! reduction techniques.
//!
//! - [`signal`]: unitary transforms, oversampling, FIR filtering, windows, RNG
//! - [`modem`]: convolutional coding, 16-QAM, pilots, cyclic-prefix OFDM
//! - [`stages`]: clip-and-filter, SLM, PTS and the peak-window / kernel-filter pipeline
//! - [`metrics`]: AWGN channel, PAPR, CCDF, BER, SNR and analytic references
//! - [`experiment`]: configuration, Monte-Carlo runs, comparison reports

pub mod error;
pub mod exec;
pub mod experiment;
pub mod metrics;
pub mod modem;
pub mod signal;
pub mod stages;

pub use error::{Error, Result};
