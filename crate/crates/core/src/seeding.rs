//! Deterministic randomness.
//!
//! A 64-bit user seed is expanded into independent streams with SplitMix64:
//! stream `k` is seeded by the `(k + 1)`-th SplitMix64 output for the user
//! seed, i.e. `mix(seed + (k + 1) * 0x9E3779B97F4A7C15)`. Each stream drives a
//! ChaCha8 generator, which is stable across platforms and crate versions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output function.
pub fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `stream` derived from `seed`.
pub fn stream_seed(seed: u64, stream: u64) -> u64 {
    splitmix64_mix(seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, stream))
}

/// Stream indices used by the crate, kept apart so that, e.g., resampling a
/// curve never shifts the point samples drawn for it.
pub mod streams {
    pub const CURVE_MODEL: u64 = 0;
    pub const BASE_DIVISOR: u64 = 1;
    /// Point samples use `POINT_SAMPLE_BASE + sample_index`.
    pub const POINT_SAMPLE_BASE: u64 = 1 << 20;
}
