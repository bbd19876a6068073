//! Counter-based randomness. A root seed expands into one ChaCha8 stream per
//! round; within a round, neuron `i` consumes word pair `i`. Trials get their
//! own root seeds through [`derive_seed`].

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream used for sampling threshold-circuit biases.
pub const BIAS_STREAM: u64 = u64::MAX - 1;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent child seed for `(root, domain, index)`.
pub fn derive_seed(root: u64, domain: u64, index: u64) -> u64 {
    splitmix(splitmix(root ^ splitmix(domain)) ^ index)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Streams {
    root: u64,
}

impl Streams {
    pub fn new(root: u64) -> Self {
        Self { root }
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    /// Generator positioned at the start of `stream`.
    pub fn stream(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.root);
        rng.set_stream(stream);
        rng
    }

    /// Generator for the given round, positioned at neuron 0.
    pub fn round(&self, round: u64) -> ChaCha8Rng {
        self.stream(round)
    }
}

/// Uniform in `[0, 1)` with 53 bits of resolution.
#[inline]
pub fn unit_closed_open(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in the open interval `(0, 1)`.
#[inline]
pub fn unit_open(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}
