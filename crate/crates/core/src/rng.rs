//! Seeded random streams.
//!
//! Every draw in a sweep comes from a ChaCha8 stream keyed by a path of
//! integers (master seed, SNR point, problem, shot, ...), so results do not
//! depend on scheduling or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a path of stream labels into a single 64-bit key.
pub fn derive_key(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &label| splitmix64(acc ^ splitmix64(label)))
}

pub fn stream(seed: u64, path: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_key(seed, path))
}
