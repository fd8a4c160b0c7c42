//! Single-flip Metropolis annealing with a geometric inverse-temperature
//! schedule and independent restarts.

use super::{chain_seed, mean_abs_entry, FlipState, SaParams, SolveOutcome};
use crate::encode::{BinaryAssignment, QuboProblem};
use crate::linsys::InstanceRng;

/// Geometric schedule `β_s = β₀·(β₁/β₀)^(s/(S−1))`; a single sweep runs at
/// `β₁`. The last sweep is always exactly `β₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSchedule {
    pub initial: f64,
    pub last: f64,
    pub sweeps: usize,
}

impl BetaSchedule {
    pub fn beta(&self, sweep: usize) -> f64 {
        if self.sweeps <= 1 || sweep + 1 >= self.sweeps {
            return self.last;
        }
        let t = sweep as f64 / (self.sweeps - 1) as f64;
        self.initial * (self.last / self.initial).powf(t)
    }

    pub(crate) fn for_problem(p: &QuboProblem, params: &SaParams) -> Self {
        let (initial, last) = params.beta.unwrap_or_else(|| {
            let scale = mean_abs_entry(p);
            let scale = if scale > 0.0 { scale } else { 1.0 };
            (0.01 / scale, 10.0 / scale)
        });
        Self {
            initial,
            last,
            sweeps: params.sweeps,
        }
    }
}

/// Metropolis rule: always take non-worsening moves, otherwise accept with
/// probability `exp(−β·Δ)` against the uniform draw `u`.
#[inline]
pub fn metropolis_accept(delta: f64, beta: f64, u: f64) -> bool {
    delta <= 0.0 || u < (-beta * delta).exp()
}

/// Runs one chain, calling `observe(sweep, delta, accepted)` for every
/// proposal.
pub(crate) fn run_chain(
    p: &QuboProblem,
    schedule: &BetaSchedule,
    rng: &mut InstanceRng,
    mut observe: impl FnMut(usize, f64, bool),
) -> (Vec<u8>, f64) {
    let n = p.dim();
    let init: Vec<u8> = (0..n).map(|_| (rng.next_u64() >> 63) as u8).collect();
    let mut state = FlipState::new(p, init);
    let mut best_bits = state.bits.clone();
    let mut best = state.energy;
    for sweep in 0..schedule.sweeps {
        let beta = schedule.beta(sweep);
        for i in 0..n {
            let d = state.delta(i);
            let accepted = d <= 0.0 || metropolis_accept(d, beta, rng.next_f64());
            observe(sweep, d, accepted);
            if accepted {
                state.flip(i, d);
                if state.energy < best {
                    best = state.energy;
                    best_bits.copy_from_slice(&state.bits);
                }
            }
        }
    }
    let exact = p.energy_of_bits(&best_bits);
    (best_bits, exact)
}

pub(super) fn solve(p: &QuboProblem, params: &SaParams, seed: u64) -> SolveOutcome {
    let schedule = BetaSchedule::for_problem(p, params);
    let mut best: Option<(Vec<u8>, f64)> = None;
    for chain in 0..params.restarts {
        let mut rng = InstanceRng::new(chain_seed(seed, chain));
        let (bits, e) = run_chain(p, &schedule, &mut rng, |_, _, _| {});
        if best.as_ref().is_none_or(|(_, be)| e < *be) {
            best = Some((bits, e));
        }
    }
    let (bits, energy) = best.expect("at least one restart");
    SolveOutcome {
        q: BinaryAssignment::from_bits_unchecked(bits),
        energy,
        evaluations: (params.restarts * params.sweeps * p.dim()) as u64,
    }
}
