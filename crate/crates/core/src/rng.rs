//! Seed derivation for reproducible sampling.
//!
//! All sampling uses ChaCha8, a counter-based stream cipher generator whose
//! output is identical on every platform. Child seeds are derived from a
//! master seed and a path of indices (sweep point, measurement setting, ...)
//! with a SplitMix64 finalizer, so results never depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed: `seed' = splitmix64(seed ^ splitmix64(index))`,
/// applied once per element of `path`.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(master, |acc, &idx| splitmix64(acc ^ splitmix64(idx)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
