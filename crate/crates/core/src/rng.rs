//! Seeded random streams.
//!
//! Every stochastic component draws from its own SplitMix64 stream derived
//! from the run seed, so adding draws in one component never shifts another.

use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

pub type Rng = SplitMix64;

/// Independent stream identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    World = 1,
    Dataset = 2,
    Split = 3,
    Init = 4,
}

/// Mixes `seed` with a stream tag (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: Stream) -> u64 {
    let mut z = seed.wrapping_add((stream as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, stream: Stream) -> Rng {
    Rng::seed_from_u64(derive_seed(seed, stream))
}
