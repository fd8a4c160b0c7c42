//! Steepest-descent single-flip tabu search.
//!
//! Each move flips the best admissible bit, even if that raises the energy.
//! A flipped bit stays tabu for `tenure` moves unless flipping it would beat
//! the best energy seen so far (aspiration). When every bit is tabu the best
//! move overall is taken.

use super::{chain_seed, FlipState, SolveOutcome, TabuParams};
use crate::encode::{BinaryAssignment, QuboProblem};
use crate::linsys::InstanceRng;

pub(super) fn solve(p: &QuboProblem, params: &TabuParams, seed: u64) -> SolveOutcome {
    let n = p.dim();
    let tenure = params.tenure.min(n.saturating_sub(1));
    let mut best_bits = vec![0u8; n];
    let mut best = p.energy_of_bits(&best_bits);
    let mut evaluations = 0u64;

    for restart in 0..params.restarts {
        let mut rng = InstanceRng::new(chain_seed(seed, restart));
        let init: Vec<u8> = (0..n).map(|_| (rng.next_u64() >> 63) as u8).collect();
        let mut state = FlipState::new(p, init);
        if state.energy < best {
            best = state.energy;
            best_bits.copy_from_slice(&state.bits);
        }
        let mut tabu_until = vec![0usize; n];

        for mv in 1..=params.max_moves {
            let mut chosen: Option<(usize, f64)> = None;
            let mut fallback: Option<(usize, f64)> = None;
            for i in 0..n {
                let d = state.delta(i);
                evaluations += 1;
                if fallback.is_none_or(|(_, fd)| d < fd) {
                    fallback = Some((i, d));
                }
                let admissible = tabu_until[i] < mv || state.energy + d < best;
                if admissible && chosen.is_none_or(|(_, cd)| d < cd) {
                    chosen = Some((i, d));
                }
            }
            let (i, d) = chosen.or(fallback).expect("non-empty problem");
            state.flip(i, d);
            tabu_until[i] = mv + tenure;
            if state.energy < best {
                best = state.energy;
                best_bits.copy_from_slice(&state.bits);
            }
        }
    }

    let energy = p.energy_of_bits(&best_bits);
    SolveOutcome {
        q: BinaryAssignment::from_bits_unchecked(best_bits),
        energy,
        evaluations,
    }
}
