//! Seed derivation for reproducible sampling.
//!
//! Every random routine in this crate takes a single `u64` seed and derives
//! independent child seeds from it with [`mix`]. Rows of a graph, folds of a
//! cross-validation run, and replicates of a study each get their own child
//! seed, so the draws for one unit never depend on how many other units run
//! or in what order. That is what makes results identical across thread
//! counts.
//!
//! The generator behind each child seed is ChaCha8, which is seedable,
//! portable across platforms, and fast enough that constructing one per graph
//! row is not a bottleneck.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed for stream `stream` from `seed`.
pub fn mix(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

/// Builds the generator used throughout the crate from a (child) seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
