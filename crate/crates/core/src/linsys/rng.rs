//! Deterministic random stream shared by the instance generator and the
//! heuristic solvers.
//!
//! The generator is xoshiro256++ whose 256-bit state is expanded from the
//! 64-bit seed with SplitMix64 (the reference seeding procedure of the
//! xoshiro authors). Floats take the top 53 bits of each output:
//! `u = (x >> 11) · 2⁻⁵³ ∈ [0, 1)`. Both steps are fixed integer recipes,
//! so streams can be reproduced outside Rust.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

#[derive(Debug, Clone)]
pub struct InstanceRng {
    inner: Xoshiro256PlusPlus,
}

impl InstanceRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`. Rounding of `lo + (hi-lo)·u` can land on `hi`;
    /// such draws are rejected.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        loop {
            let v = lo + (hi - lo) * self.next_f64();
            if v < hi {
                return v;
            }
        }
    }

    /// Uniform integer on `0..n` by rejection (no modulo bias).
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % n) as usize;
            }
        }
    }
}
