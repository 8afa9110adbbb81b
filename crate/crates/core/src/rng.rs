//! Seeded random streams.
//!
//! Every random decision in the generator flows through an [`RngStream`]
//! derived from a 64-bit seed, so a sample can be regenerated from its
//! manifest alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        RngStream(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform integer in `[0, bound)`. `bound` must be positive.
    pub fn below(&mut self, bound: u32) -> u32 {
        self.0.random_range(0..bound)
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn between(&mut self, lo: i32, hi: i32) -> i32 {
        self.0.random_range(lo..=hi)
    }

    /// Uniform float in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.random::<u64>()
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable per-sample seed from `(master_seed, doc_id, n)`.
///
/// Platform and toolchain independent (FNV-1a over little-endian fields,
/// finalized with SplitMix64), so samples can be regenerated individually and
/// in any order.
pub fn sample_seed(master_seed: u64, doc_id: &str, n: u32) -> u64 {
    let mut h = fnv1a(FNV_OFFSET, &master_seed.to_le_bytes());
    h = fnv1a(h, doc_id.as_bytes());
    h = fnv1a(h, &[0xff]);
    h = fnv1a(h, &n.to_le_bytes());
    splitmix64(h)
}
