//! Seeded, counter-based random source.
//!
//! The generator is ChaCha8 (`rand_chacha`) keyed with the little-endian seed in
//! the first eight key bytes, remaining key bytes zero, stream 0. Gaussian draws
//! use `rand_distr::StandardNormal` (ziggurat). The word counter is exposed so a
//! draw position can be recorded and restored.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        Self {
            seed,
            rng: ChaCha8Rng::from_seed(key),
        }
    }

    /// Stream whose seed is derived from a parent seed and labelled parts.
    pub fn derived(seed: u64, parts: &[&[u8]]) -> Self {
        Self::new(derive_seed(seed, parts))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn set_counter(&mut self, words: u128) {
        self.rng.set_word_pos(words);
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    /// Uniform index in `0..n`. `n` must be non-zero.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn bits(&mut self, count: usize) -> Vec<u8> {
        (0..count)
            .map(|_| self.rng.random::<bool>() as u8)
            .collect()
    }

    pub fn gaussian(&mut self, count: usize) -> Vec<f64> {
        (&mut self.rng)
            .sample_iter(StandardNormal)
            .take(count)
            .collect()
    }
}

/// i.i.d. standard normal draws; advances `stream`.
pub fn draw_gaussian(stream: &mut RandomStream, count: usize) -> Vec<f64> {
    stream.gaussian(count)
}

/// First eight bytes (little-endian) of SHA-256 over the seed followed by each
/// part, each part prefixed with its length so that concatenations cannot collide.
pub fn derive_seed(seed: u64, parts: &[&[u8]]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part);
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}
