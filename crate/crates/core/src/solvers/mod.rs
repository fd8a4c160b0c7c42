//! Interchangeable QUBO minimisers.
//!
//! All backends work on the local-field form of the energy: for the current
//! assignment `q`, `g_i = Σ_k Q_ik·q_k`, and flipping bit `i` changes the
//! energy by `d·(Q_ii + 2·(g_i − Q_ii·q_i))` with `d = 1 − 2·q_i`. After a
//! flip the fields are updated with one row of `Q`, so each move is `O(n)`.

mod anneal;
mod exhaustive;
mod tabu;

use std::fmt;
use std::str::FromStr;

use crate::encode::{BinaryAssignment, QuboProblem};
use crate::error::{Error, Result};

pub use anneal::{metropolis_accept, BetaSchedule};
pub use exhaustive::MAX_EXHAUSTIVE_DIM;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Exhaustive,
    SimulatedAnnealing,
    Tabu,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Exhaustive => "exhaustive",
            SolverKind::SimulatedAnnealing => "sa",
            SolverKind::Tabu => "tabu",
        })
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" | "exact" => Ok(SolverKind::Exhaustive),
            "sa" | "simulated-annealing" | "anneal" => Ok(SolverKind::SimulatedAnnealing),
            "tabu" => Ok(SolverKind::Tabu),
            other => Err(Error::InvalidParameter(format!("unknown solver `{other}`"))),
        }
    }
}

/// Simulated-annealing parameters. `beta` of `None` selects the scale-free
/// default `0.01/⟨|Q|⟩ → 10/⟨|Q|⟩`, with `⟨|Q|⟩` the mean absolute entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaParams {
    pub sweeps: usize,
    pub restarts: usize,
    pub beta: Option<(f64, f64)>,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            sweeps: 1000,
            restarts: 4,
            beta: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TabuParams {
    /// Moves for which a flipped bit stays tabu (capped at `n − 1`).
    pub tenure: usize,
    pub max_moves: usize,
    pub restarts: usize,
}

impl Default for TabuParams {
    fn default() -> Self {
        Self {
            tenure: 8,
            max_moves: 2000,
            restarts: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSpec {
    pub kind: SolverKind,
    pub seed: u64,
    pub sa: SaParams,
    pub tabu: TabuParams,
}

impl SolverSpec {
    pub fn exhaustive() -> Self {
        Self::with_kind(SolverKind::Exhaustive)
    }

    pub fn annealing(seed: u64, sa: SaParams) -> Self {
        Self {
            seed,
            sa,
            ..Self::with_kind(SolverKind::SimulatedAnnealing)
        }
    }

    pub fn tabu(seed: u64, tabu: TabuParams) -> Self {
        Self {
            seed,
            tabu,
            ..Self::with_kind(SolverKind::Tabu)
        }
    }

    pub fn with_kind(kind: SolverKind) -> Self {
        Self {
            kind,
            seed: 0,
            sa: SaParams::default(),
            tabu: TabuParams::default(),
        }
    }

    /// Same solver with a different seed.
    pub fn reseeded(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        match self.kind {
            SolverKind::Exhaustive => Ok(()),
            SolverKind::SimulatedAnnealing => {
                if self.sa.sweeps == 0 || self.sa.restarts == 0 {
                    return bad("annealing sweeps and restarts must be >= 1");
                }
                if let Some((b0, b1)) = self.sa.beta {
                    if !(b0 > 0.0 && b0.is_finite() && b1 > b0) {
                        return bad("need 0 < beta_initial < beta_final");
                    }
                }
                Ok(())
            }
            SolverKind::Tabu => {
                if self.tabu.tenure == 0 || self.tabu.max_moves == 0 || self.tabu.restarts == 0 {
                    return bad("tabu tenure, max_moves and restarts must be >= 1");
                }
                Ok(())
            }
        }
    }
}

/// Result of one QUBO minimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub q: BinaryAssignment,
    /// `qᵀQq`, recomputed from scratch for the returned assignment.
    pub energy: f64,
    /// Number of assignments (exhaustive) or single-flip deltas (heuristics)
    /// evaluated.
    pub evaluations: u64,
}

/// Minimises `qᵀQq` with the configured backend. Deterministic given
/// `cfg.seed`.
pub fn solve_qubo(p: &QuboProblem, cfg: &SolverSpec) -> Result<SolveOutcome> {
    cfg.validate()?;
    match cfg.kind {
        SolverKind::Exhaustive => exhaustive::solve(p),
        SolverKind::SimulatedAnnealing => {
            if p.dim() == 0 {
                return Err(Error::EmptyProblem);
            }
            Ok(anneal::solve(p, &cfg.sa, cfg.seed))
        }
        SolverKind::Tabu => {
            if p.dim() == 0 {
                return Err(Error::EmptyProblem);
            }
            Ok(tabu::solve(p, &cfg.tabu, cfg.seed))
        }
    }
}

/// Local fields `g = Q·q` with single-flip bookkeeping.
#[derive(Debug, Clone)]
pub(crate) struct FlipState<'a> {
    q: &'a [f64],
    n: usize,
    pub bits: Vec<u8>,
    fields: Vec<f64>,
    pub energy: f64,
}

impl<'a> FlipState<'a> {
    pub fn new(p: &'a QuboProblem, bits: Vec<u8>) -> Self {
        let n = p.dim();
        let q = p.q_matrix().as_slice();
        let mut fields = vec![0.0; n];
        for (k, &b) in bits.iter().enumerate() {
            if b == 1 {
                for (g, &qik) in fields.iter_mut().zip(&q[k * n..(k + 1) * n]) {
                    *g += qik;
                }
            }
        }
        let energy = bits
            .iter()
            .zip(&fields)
            .filter(|(&b, _)| b == 1)
            .map(|(_, &g)| g)
            .sum();
        Self {
            q,
            n,
            bits,
            fields,
            energy,
        }
    }

    #[inline]
    pub fn field(&self, i: usize) -> f64 {
        self.fields[i]
    }

    #[inline]
    pub fn delta(&self, i: usize) -> f64 {
        let qii = self.q[i * self.n + i];
        if self.bits[i] == 0 {
            qii + 2.0 * self.fields[i]
        } else {
            -(2.0 * self.fields[i] - qii)
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize, delta: f64) {
        let row = &self.q[i * self.n..(i + 1) * self.n];
        if self.bits[i] == 0 {
            self.bits[i] = 1;
            for (g, &qik) in self.fields.iter_mut().zip(row) {
                *g += qik;
            }
        } else {
            self.bits[i] = 0;
            for (g, &qik) in self.fields.iter_mut().zip(row) {
                *g -= qik;
            }
        }
        self.energy += delta;
    }
}

pub(crate) fn mean_abs_entry(p: &QuboProblem) -> f64 {
    let q = p.q_matrix().as_slice();
    if q.is_empty() {
        return 0.0;
    }
    q.iter().map(|v| v.abs()).sum::<f64>() / q.len() as f64
}

/// Per-chain seed: distinct restarts get decorrelated streams.
pub(crate) fn chain_seed(seed: u64, chain: usize) -> u64 {
    seed ^ (chain as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}
