//! Seeded random streams.
//!
//! Every stochastic operation in this crate takes an explicit stream so that
//! runs are reproducible bit-for-bit. Parallel work derives per-lane
//! substreams from a root seed; the derivation is a pure function of
//! `(seed, lane)`, so replicate ordering never affects output.

use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;

/// The concrete RNG used throughout the crate.
pub type Stream = ChaCha12Rng;

/// Root stream for a given seed.
pub fn stream(seed: u64) -> Stream {
    Stream::seed_from_u64(seed)
}

/// Independent substream for a parallel lane (replicate, worker, ...).
pub fn substream(seed: u64, lane: u64) -> Stream {
    Stream::seed_from_u64(splitmix64(seed ^ splitmix64(lane.wrapping_add(0x9e37_79b9_7f4a_7c15))))
}

// SplitMix64 finalizer; decorrelates nearby lane indices.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
