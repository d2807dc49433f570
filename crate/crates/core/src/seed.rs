//! Deterministic sub-seed derivation.
//!
//! Every random stream in a simulation is keyed by a tuple of integers
//! (global seed, trial index, stage tag, UE index, ...). Streams therefore do
//! not depend on execution order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `tags` into `base`, one splitmix64 round per tag.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix64(base), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

pub fn rng_from(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stage tags used by the trial runner.
pub mod tag {
    pub const SCENARIO: u64 = 1;
    pub const BELIEFS: u64 = 2;
    pub const SELECTION: u64 = 3;
    pub const CHANNEL: u64 = 4;
}
