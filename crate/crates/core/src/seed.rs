//! Seed splitting.
//!
//! Every random stream in the crate is derived from a single master seed. A
//! child seed is obtained with
//!
//! ```text
//! child(master, index) = mix64(master + (index + 1) * 0x9E3779B97F4A7C15)
//! ```
//!
//! where `mix64` is the SplitMix64 finalizer and all arithmetic wraps modulo
//! 2^64. Distinct indices give statistically independent streams, so corpus
//! entries can be generated in any order (or concurrently) and still be
//! reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives the `index`-th child seed of `master`.
pub fn split(master: u64, index: u64) -> u64 {
    mix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Stream tags used when one seed must feed several independent consumers.
pub mod stream {
    pub const TRAIN_CORPUS: u64 = 0x7472_6169_6e00;
    pub const VALIDATION_CORPUS: u64 = 0x7661_6c00;
    pub const TEST_CORPUS: u64 = 0x7465_7374_00;
    pub const RESOLVENT_PROBE: u64 = 0x7072_6f62_6500;
    pub const SAMPLING: u64 = 0x7361_6d70_00;
    pub const INIT: u64 = 0x696e_6974_00;
    pub const SHUFFLE: u64 = 0x7368_7566_00;
    pub const SPLIT: u64 = 0x7370_6c69_7400;
    pub const BASELINE: u64 = 0x6261_7365_00;
}

/// Deterministic RNG for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
