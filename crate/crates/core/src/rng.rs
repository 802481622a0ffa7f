//! Seed derivation for reproducible streams.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] seeded with a
//! 64-bit value. Child seeds are derived from a parent seed and a stream index
//! with the SplitMix64 finalizer:
//!
//! ```text
//! split(seed, k) = mix64(seed + 0x9E3779B97F4A7C15 * (k + 1))
//! ```
//!
//! Ensembles use `split(master, k)` for member `k`; sweeps use
//! `split(split(master, grid_index), k)`. Results therefore do not depend on
//! the order in which members are computed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of child stream `index` from `seed`.
pub fn split(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

/// Generator for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for child stream `index` of `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    rng(split(seed, index))
}
