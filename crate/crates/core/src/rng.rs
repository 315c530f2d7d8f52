//! Deterministic pseudo-random number generation.
//!
//! Training, fixtures, and the hashed embedding provider all need streams
//! that are byte-stable across runs and platforms, so the generator is
//! specified here down to the bit: splitmix64 for seeding and hashing,
//! xoshiro256++ for the main stream.

use crate::mathx;

/// One splitmix64 step. Also used as a standalone mixing function.
#[inline]
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a over bytes, folded with a seed through splitmix64.
///
/// Deterministic across platforms; used to hash tokens into embedding and
/// parameter-table indices.
pub fn hash_bytes(seed: u64, bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut s = seed ^ h;
    splitmix64(&mut s)
}

/// xoshiro256++ generator.
#[derive(Debug, Clone, PartialEq)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Rng { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, bound) by rejection-free scaling.
    pub fn next_below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        let r = self.next_f64();
        let i = (r * bound as f64) as usize;
        i.min(bound - 1)
    }

    /// Standard normal via Box-Muller (one value per call, the pair's
    /// second half is discarded to keep the stream layout simple).
    pub fn next_gaussian(&mut self) -> f64 {
        let mut u = self.next_f64();
        if u <= 0.0 {
            u = f64::MIN_POSITIVE;
        }
        let v = self.next_f64();
        mathx::sqrt(-2.0 * mathx::ln(u)) * mathx::cos(2.0 * core::f64::consts::PI * v)
    }

    /// Sample an index from a discrete distribution (need not be exactly
    /// normalized; the last index absorbs rounding slack).
    pub fn sample_discrete(&mut self, probs: &[f64]) -> usize {
        debug_assert!(!probs.is_empty());
        let r = self.next_f64();
        let mut acc = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            acc += p;
            if r < acc {
                return i;
            }
        }
        probs.len() - 1
    }
}
