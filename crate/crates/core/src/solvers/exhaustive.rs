//! Brute-force enumeration.
//!
//! The variables are split into `m` outer and `k ≤ 12` inner ones. Energies
//! of all inner-only assignments are tabulated once; for each outer
//! assignment (visited in Gray-code order with local-field updates) every
//! inner completion then costs `O(1)`, since
//! `E(o, c) = E(o) + E(c) + 2·Σ_{i∈c} G_i(o)` with `G(o) = Q·o`. The inner
//! block is scanned in full only when its minimum can reach the incumbent.
//!
//! Ties are broken towards the smallest assignment read as a binary
//! integer with `q[0]` as the most significant bit. Energies within a
//! small window of the incumbent are recomputed from scratch before the
//! comparison, so accumulated rounding in the incremental energy cannot
//! reorder genuine ties.

use super::{FlipState, SolveOutcome};
use crate::encode::{BinaryAssignment, QuboProblem};
use crate::error::{Error, Result};

/// Largest dimension accepted by the exhaustive backend (`2²⁴` states).
pub const MAX_EXHAUSTIVE_DIM: usize = 24;

const MAX_INNER: usize = 12;

struct Incumbent<'a> {
    p: &'a QuboProblem,
    window: f64,
    energy: f64,
    exact: Option<f64>,
    code: u32,
}

impl Incumbent<'_> {
    fn bits(&self) -> Vec<u8> {
        let n = self.p.dim();
        (0..n).map(|i| (self.code >> (n - 1 - i) & 1) as u8).collect()
    }

    #[inline]
    fn consider(&mut self, e: f64, code: u32) {
        if e > self.energy + self.window {
            return;
        }
        if e < self.energy - self.window {
            self.energy = e;
            self.exact = None;
            self.code = code;
            return;
        }
        self.near_tie(code);
    }

    #[cold]
    fn near_tie(&mut self, code: u32) {
        let incumbent = match self.exact {
            Some(v) => v,
            None => {
                let v = self.p.energy_of_bits(&self.bits());
                self.exact = Some(v);
                v
            }
        };
        let n = self.p.dim();
        let bits: Vec<u8> = (0..n).map(|i| (code >> (n - 1 - i) & 1) as u8).collect();
        let exact = self.p.energy_of_bits(&bits);
        if exact < incumbent || (exact == incumbent && code < self.code) {
            self.energy = exact;
            self.exact = Some(exact);
            self.code = code;
        }
    }
}

/// Minimum of `v` with independent lanes so the loop vectorises.
fn block_min(v: &[f64]) -> f64 {
    let mut lanes = [f64::INFINITY; 8];
    let mut chunks = v.chunks_exact(8);
    for ch in &mut chunks {
        for (l, &x) in lanes.iter_mut().zip(ch) {
            *l = if x < *l { x } else { *l };
        }
    }
    let mut m = chunks.remainder().iter().fold(f64::INFINITY, |a, &x| if x < a { x } else { a });
    for l in lanes {
        m = if l < m { l } else { m };
    }
    m
}

pub(super) fn solve(p: &QuboProblem) -> Result<SolveOutcome> {
    let n = p.dim();
    if n > MAX_EXHAUSTIVE_DIM {
        return Err(Error::ProblemTooLarge {
            dim: n,
            max: MAX_EXHAUSTIVE_DIM,
        });
    }
    if n == 0 {
        return Ok(SolveOutcome {
            q: BinaryAssignment::zeros(0),
            energy: 0.0,
            evaluations: 1,
        });
    }

    let k = n.min(MAX_INNER);
    let m = n - k;
    let q = p.q_matrix();

    // Inner-only energies, indexed by the inner code (bit k-1-i is q[m+i]),
    // filled by a Gray-code walk.
    let inner_states = 1usize << k;
    let mut table = vec![0.0; inner_states];
    {
        let mut fields = vec![0.0; k];
        let mut cur = 0usize;
        let mut code = 0usize;
        let mut e = 0.0;
        for t in 1..inner_states {
            let i = t.trailing_zeros() as usize;
            let qii = q[(m + i, m + i)];
            let on = cur >> i & 1 == 0;
            let d = if on { qii + 2.0 * fields[i] } else { qii - 2.0 * fields[i] };
            e += d;
            cur ^= 1 << i;
            code ^= 1 << (k - 1 - i);
            let sign = if on { 1.0 } else { -1.0 };
            for (j, g) in fields.iter_mut().enumerate() {
                *g += sign * q[(m + i, m + j)];
            }
            table[code] = e;
        }
    }

    let scale: f64 = q.as_slice().iter().map(|v| v.abs()).sum();
    let mut best = Incumbent {
        p,
        window: 1e-10 * scale,
        energy: 0.0,
        exact: Some(0.0),
        code: 0,
    };

    let mut outer = FlipState::new(p, vec![0; n]);
    let mut outer_code = 0u32;
    // twice_g[b] is 2·G for the inner variable carried by code bit b.
    let mut twice_g = vec![0.0; k];
    let mut total = vec![0.0; inner_states];
    for step in 0..1usize << m {
        if step > 0 {
            let j = step.trailing_zeros() as usize;
            let d = outer.delta(j);
            outer.flip(j, d);
            outer_code ^= 1 << (n - 1 - j);
        }
        for (b, g) in twice_g.iter_mut().enumerate() {
            *g = 2.0 * outer.field(m + k - 1 - b);
        }
        // Cross term by subset recurrence: lin(c) = lin(c − lowbit) + 2·G(lowbit).
        total[0] = 0.0;
        for c in 1..inner_states {
            total[c] = total[c & (c - 1)] + twice_g[c.trailing_zeros() as usize];
        }
        for (t, &e) in total.iter_mut().zip(&table) {
            *t += e;
        }
        let base = outer.energy;
        if base + block_min(&total) > best.energy + best.window {
            continue;
        }
        for (c, &e) in total.iter().enumerate() {
            best.consider(base + e, outer_code | c as u32);
        }
    }

    let bits = best.bits();
    let energy = p.energy_of_bits(&bits);
    Ok(SolveOutcome {
        q: BinaryAssignment::from_bits_unchecked(bits),
        energy,
        evaluations: 1u64 << n,
    })
}
