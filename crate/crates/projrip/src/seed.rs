//! Deterministic seed derivation.
//!
//! Every randomized operation takes an explicit `u64` seed; independent
//! internal streams are derived from it with [`derive`] so that a single
//! seed reproduces an entire experiment regardless of scheduling. There is
//! no global RNG anywhere in the crate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer (Steele, Lea & Flood 2014). Bijective on u64.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a stream tag.
///
/// `derive(seed, i)` for distinct `i` yields statistically independent
/// streams; nesting (`derive(derive(seed, i), j)`) is the intended way to
/// split per-trial, per-operator, and per-point streams.
pub fn derive(seed: u64, tag: u64) -> u64 {
    mix(seed ^ mix(tag))
}

/// Deterministic generator for a given seed.
///
/// ChaCha8 is used so that a seed maps to the same stream on every
/// platform and build.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
