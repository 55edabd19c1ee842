//! Seed-stream derivation shared by the pipeline stages.
//!
//! Every stage that needs randomness derives an independent ChaCha8 stream
//! from `(seed, salt)` with a splitmix64 mix, so stages and scenes can run in
//! any order (or in parallel) without perturbing each other's draws.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Salt offsets keeping the per-purpose streams disjoint.
pub(crate) const SALT_SCENE_BUILD: u64 = 0x5ce9_e001;
pub(crate) const SALT_REPAIR: u64 = 0x5ce9_e002;
pub(crate) const SALT_QA: u64 = 0x5ce9_e003;

/// splitmix64 finalizer (Vigna); standard constants.
pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives a child stream seed from `(seed, salt)`.
pub(crate) fn derive_stream(seed: u64, salt: u64) -> u64 {
    splitmix64(seed ^ splitmix64(salt))
}

/// A ChaCha8 generator for the given `(seed, salt)` stream.
pub(crate) fn stream_rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_stream(seed, salt))
}
