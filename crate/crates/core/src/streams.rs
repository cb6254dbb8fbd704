//! Deterministic, splittable RNG streams.
//!
//! Every stochastic estimate in the crate draws from its own stream derived
//! from a root seed and a chain of tags (iteration, purpose, parameter index,
//! shift sign, ...). Derivation is a pure 64-bit mix, so estimates stay
//! reproducible when evaluated in parallel and independent across tags.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags used when deriving child streams. Keeping them in one place
/// avoids accidental collisions between call sites.
pub mod tags {
    pub const INIT_GEN: u64 = 0x01;
    pub const INIT_DISC: u64 = 0x02;
    pub const TARGET_PARAMS: u64 = 0x03;
    pub const VALUE: u64 = 0x10;
    pub const GEN_GRAD: u64 = 0x11;
    pub const DISC_GRAD: u64 = 0x12;
    pub const METRIC_VALUE: u64 = 0x13;
    pub const METRIC_BEE: u64 = 0x14;
    pub const AXIS_X: u64 = 0x20;
    pub const AXIS_Y: u64 = 0x21;
    pub const AXIS_Z: u64 = 0x22;
    pub const BRANCH_TARGET: u64 = 0x30;
    pub const BRANCH_GENERATED: u64 = 0x31;
    pub const SHIFT_PLUS: u64 = 0x40;
    pub const SHIFT_MINUS: u64 = 0x41;
    pub const SWAP_TEST: u64 = 0x50;
    pub const GEN_PHASE: u64 = 0x60;
    pub const DISC_PHASE: u64 = 0x61;
    pub const REP_TARGET: u64 = 0x70;
    pub const REP_INIT: u64 = 0x71;
    pub const REP_SHOTS: u64 = 0x72;
}

/// SplitMix64 finalizer; a bijection on u64 with good avalanche behavior.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// A key identifying one RNG stream.
///
/// Distinct tag chains from the same root yield distinct keys (`splitmix64`
/// is a bijection, so the derivation never collapses siblings).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn root(seed: u64) -> Self {
        StreamKey(splitmix64(seed))
    }

    /// Derive the child stream for `tag`.
    #[must_use]
    pub fn child(self, tag: u64) -> Self {
        StreamKey(splitmix64(self.0 ^ splitmix64(tag.wrapping_add(0x6a09_e667_f3bc_c909))))
    }

    /// Instantiate the stream as a seeded ChaCha generator.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    pub fn value(self) -> u64 {
        self.0
    }
}
