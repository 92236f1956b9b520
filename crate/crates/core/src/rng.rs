//! Deterministic stream derivation for parallel random number use.
//!
//! Every stochastic component derives an independent stream from
//! `(master seed, domain tag, index)` so that work items can run in any
//! order, or in parallel, without changing the output.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DOMAIN_AGENT: u64 = 0x41_47_45_4e_54; // agent trajectories
pub const DOMAIN_EDGE: u64 = 0x45_44_47_45; // edge sampling
pub const DOMAIN_KMEANS: u64 = 0x4b_4d_45_41_4e; // k-means restarts

/// splitmix64 finalizer; full-period mixing of a 64-bit state.
#[inline]
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `(seed, domain, index)` into a stream key.
#[inline]
pub fn stream_key(seed: u64, domain: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ domain.wrapping_mul(0x9e37_79b9_7f4a_7c15)) ^ index)
}

/// A seeded generator for the given `(seed, domain, index)` stream.
pub fn stream_rng(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_key(seed, domain, index))
}

/// Counter-addressed uniform variates: each counter value yields one
/// reproducible sample in `[0, 1)`, independent of evaluation order.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64, domain: u64, index: u64) -> Self {
        Self {
            key: stream_key(seed, domain, index),
        }
    }

    #[inline]
    pub fn uniform(&self, counter: u64) -> f64 {
        let bits = splitmix64(self.key ^ splitmix64(counter));
        // 53 high bits -> [0, 1) double
        (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
