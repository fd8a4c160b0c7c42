use super::report::Tracer;
use super::{subproblem_seed, IterationParams, SolveReport};
use crate::encode::{bit_weights, bits_to_xhat, box_decode, encode_square, kron_weights};
use crate::encode::{QuboProblem, SearchBox};
use crate::error::Result;
use crate::linsys::{ensure_len, LinearSystem, Vector};
use crate::solvers::{solve_qubo, SolverSpec};

/// Placement of the square lattice around `x0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Lattice {
    /// `x = x0 + l·(x̂ − 1)`.
    #[default]
    Corner,
    /// `x = x0 + (l/2)·(x̂ − 1/2)`, the canonical-basis case of the block
    /// geometry.
    Centered,
}

/// Square-lattice driver with the corner lattice.
pub fn solve_square(
    sys: &LinearSystem,
    x0: &[f64],
    params: &IterationParams,
    solver: &SolverSpec,
) -> Result<SolveReport> {
    solve_square_with(sys, x0, params, solver, Lattice::Corner)
}

pub fn solve_square_with(
    sys: &LinearSystem,
    x0: &[f64],
    params: &IterationParams,
    solver: &SolverSpec,
    lattice: Lattice,
) -> Result<SolveReport> {
    params.validate()?;
    solver.validate()?;
    let n = sys.dim();
    ensure_len("square driver (x0)", n, x0.len())?;
    let r = params.r_bits;
    let mut x = Vector::new(x0.to_vec())?;
    let mut tracer = Tracer::new(params, sys.residual_norm_sq_raw(&x));

    let a_q = kron_weights(sys.a(), &bit_weights(r));
    let a_ones = sys.a().mul_vec_raw(&vec![1.0; n]);

    let mut early = false;
    for (k, &l) in params.l_schedule().iter().enumerate() {
        let iteration = k + 1;
        let cfg = solver.reseeded(subproblem_seed(solver.seed, iteration, 0));
        let (bits, next) = match lattice {
            Lattice::Corner => {
                let bx = SearchBox::new(x, l, r)?;
                let p = encode_square(sys, &bx)?;
                let out = solve_qubo(&p, &cfg)?;
                let next = box_decode(&bx, &out.q)?;
                (out.q, next)
            }
            Lattice::Centered => {
                let h = l / 2.0;
                let a_x = sys.a().mul_vec_raw(&x);
                let b_q: Vec<f64> = (0..n)
                    .map(|i| (sys.b()[i] + h / 2.0 * a_ones[i] - a_x[i]) / h)
                    .collect();
                let p = QuboProblem::from_least_squares(a_q.clone(), Vector::new(b_q)?)?;
                let out = solve_qubo(&p, &cfg)?;
                let xhat = bits_to_xhat(&out.q, n, r)?;
                let next: Vec<f64> = (0..n).map(|i| x[i] + h * (xhat[i] - 0.5)).collect();
                (out.q, Vector::new(next)?)
            }
        };
        x = next;
        let f = sys.residual_norm_sq_raw(&x);
        if tracer.record(iteration, l, &x, f, bits) {
            early = true;
            break;
        }
    }
    Ok(tracer.finish(x.into_vec(), early))
}
