//! Iterative solve loops.
//!
//! Every driver repeats: encode the residual around the current point,
//! pick a lattice point, move there, divide `L` by `c`.
//!
//! In the square geometry `l` follows the corner convention
//! `x = x0 + l·(x̂ − 1)`. The rhombus and block geometries are centred:
//! `l` is the edge length of the search region along each basis vector,
//! the region spans `x0 ± (l/2)·v_j`, and a single bit per direction picks
//! one of the two sub-region centres `x0 ± (l/4)·v_j`. With this reading a
//! solution inside the region stays inside for every `c ≤ 2`.

mod block;
mod report;
mod rhombus;
mod square;

pub use block::{solve_block, solve_block_with, BlockOptions};
pub use report::{
    IterationParams, IterationRecord, SnapshotPolicy, SolveReport, StopReason, Snapshot,
};
pub use rhombus::{solve_rhombus, solve_rhombus_with_basis};
pub use square::{solve_square, solve_square_with, Lattice};

use crate::error::{Error, Result};
use crate::geometry::{conjugate_basis, ConjugateBasis, RhombusFrame};
use crate::linsys::{ensure_len, LinearSystem};

/// Safety factor applied by the `suggest_l*` helpers.
pub const SUGGEST_L_SAFETY: f64 = 1.25;

/// Seed for the sub-problem `block` of iteration `iteration` (1-based),
/// a SplitMix64 finalisation of the three inputs.
pub fn subproblem_seed(seed: u64, iteration: usize, block: usize) -> u64 {
    let mut z = seed
        ^ (iteration as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (block as u64).wrapping_mul(0xd1b5_4a32_d192_ed03);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Initial edge length for the rhombus driver that is guaranteed to
/// contain the solution.
///
/// With `x0 − x* = Σ_j D_j·v_j` and `H`-orthogonal unit rows,
/// `f(x0) = Σ_j C_j·D_j²`, so `|D_j| ≤ √(f(x0)/C_j)`. Returns
/// `2·1.25·max_j √(f(x0)/C_j)`.
pub fn suggest_l(sys: &LinearSystem, x0: &[f64]) -> Result<f64> {
    suggest_l_with_basis(sys, &conjugate_basis(sys.a())?, x0)
}

pub fn suggest_l_with_basis(sys: &LinearSystem, basis: &ConjugateBasis, x0: &[f64]) -> Result<f64> {
    ensure_len("suggest_l (x0)", sys.dim(), x0.len())?;
    let f0 = sys.residual_norm_sq(x0)?;
    let bound = basis
        .c()
        .iter()
        .map(|&c| (f0 / c).sqrt())
        .fold(0.0, f64::max);
    positive_l(2.0 * SUGGEST_L_SAFETY * bound)
}

/// `2·1.25·max_j |D_j|` for the coefficients of a known reference point
/// (e.g. a direct solution) in the rows of `v`.
pub fn suggest_l_from_reference(
    v: &crate::linsys::DenseMatrix,
    x0: &[f64],
    x_ref: &[f64],
) -> Result<f64> {
    let d = RhombusFrame::new(v)?.coefficients(x0, x_ref)?;
    positive_l(2.0 * SUGGEST_L_SAFETY * d.norm_inf())
}

fn positive_l(l: f64) -> Result<f64> {
    if l > 0.0 && l.is_finite() {
        Ok(l)
    } else {
        Err(Error::InvalidParameter(format!(
            "cannot suggest an edge length (got {l}); x0 may already solve the system"
        )))
    }
}
