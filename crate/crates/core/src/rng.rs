//! Pinned, portable random streams.
//!
//! Every stream is xoshiro256** (Blackman & Vigna) whose 256-bit state is
//! filled from four consecutive outputs of SplitMix64 started at the 64-bit
//! seed. Range reduction is done here rather than through a generic
//! distribution so the exact mapping from raw outputs to values is fixed:
//!
//! * `below(n)`: draw `x`, reject while `x < 2^64 mod n`, return `x % n`.
//! * `unit()`: `(x >> 11) * 2^-53`, uniform on `[0, 1)`.
//!
//! Seeds for individual runs come from [`derive_seed`], which folds a list of
//! 64-bit words through the SplitMix64 finalizer. Keys are built from stable
//! names (see [`name_key`]) rather than positions in a sweep, so adding
//! configurations never changes the seed of an existing one.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256StarStar};

#[derive(Debug, Clone)]
pub struct SimRng {
    inner: Xoshiro256StarStar,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        let mut sm = SplitMix64::seed_from_u64(seed);
        let mut state = [0u8; 32];
        for chunk in state.chunks_exact_mut(8) {
            chunk.copy_from_slice(&sm.next_u64().to_le_bytes());
        }
        SimRng {
            inner: Xoshiro256StarStar::from_seed(state),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `[0, n)`. `n` must be non-zero.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        // 2^64 mod n; the accepted draws [threshold, 2^64) form whole multiples of n.
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % n;
            }
        }
    }

    /// Uniform float in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// SplitMix64 output function applied to a single word.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combines words into one seed. Order-sensitive.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6a09_e667_f3bc_c908, |h, &p| mix64(h ^ p))
}

/// 64-bit FNV-1a of a name, for use as a [`derive_seed`] word.
pub fn name_key(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
