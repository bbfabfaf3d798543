//! Seed derivation for reproducible parallel Monte Carlo.
//!
//! Every random stream is a [`ChaCha8Rng`] seeded through
//! [`SeedableRng::seed_from_u64`]. Replicate `r` of a stream with base seed
//! `s` uses `s XOR (r * STREAM_MULTIPLIER)`. When streams are nested
//! (grid point, then replicate, then resample) the parent seed is passed
//! through [`splitmix64`] first so that `(i, j)` and `(j, i)` do not collide.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Odd multiplier used for stream splitting (2^64 / golden ratio).
pub const STREAM_MULTIPLIER: u64 = 0x9E37_79B9_7F4A_7C15;

/// The generator used everywhere in the crate.
pub type McRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> McRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of replicate `index` in the stream rooted at `base`.
#[inline]
pub fn stream_seed(base: u64, index: u64) -> u64 {
    base ^ index.wrapping_mul(STREAM_MULTIPLIER)
}

/// Seed of replicate `index` in a sub-stream of `parent`.
#[inline]
pub fn child_seed(parent: u64, index: u64) -> u64 {
    stream_seed(splitmix64(parent), index)
}

/// One round of the SplitMix64 output function.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(STREAM_MULTIPLIER);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
