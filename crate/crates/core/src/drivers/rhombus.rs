use super::report::Tracer;
use super::{IterationParams, SolveReport};
use crate::encode::BinaryAssignment;
use crate::error::Result;
use crate::geometry::{conjugate_basis, ConjugateBasis};
use crate::linsys::{ensure_len, LinearSystem};

/// Rhombus driver: the QUBO over a fully conjugate basis is diagonal, so
/// each bit is set by the sign of its coefficient and no solver runs.
/// `params.r_bits` is ignored (one bit per direction).
pub fn solve_rhombus(
    sys: &LinearSystem,
    x0: &[f64],
    params: &IterationParams,
) -> Result<SolveReport> {
    let basis = conjugate_basis(sys.a())?;
    solve_rhombus_with_basis(sys, &basis, x0, params)
}

/// As [`solve_rhombus`] with a precomputed basis.
pub fn solve_rhombus_with_basis(
    sys: &LinearSystem,
    basis: &ConjugateBasis,
    x0: &[f64],
    params: &IterationParams,
) -> Result<SolveReport> {
    params.validate()?;
    let n = sys.dim();
    ensure_len("rhombus driver (x0)", n, x0.len())?;
    ensure_len("rhombus driver (basis)", n, basis.dim())?;
    let v = basis.v();
    let c = basis.c();
    let a = sys.a();

    // A_q = A·Vᵀ; column j is A·v_j.
    let a_q = a.mul_transpose(v)?;
    debug_assert_diagonal(&a_q);
    let a_q_ones = a_q.mul_vec_raw(&vec![1.0; n]);

    let mut x = x0.to_vec();
    let mut tracer = Tracer::new(params, sys.residual_norm_sq_raw(&x));
    let mut early = false;
    for (k, &l) in params.l_schedule().iter().enumerate() {
        let h = l / 2.0;
        let a_x = a.mul_vec_raw(&x);
        let b_q: Vec<f64> = (0..n)
            .map(|i| (sys.b()[i] + h / 2.0 * a_q_ones[i] - a_x[i]) / h)
            .collect();
        let lin = a_q.tr_mul_vec_raw(&b_q);
        let bits: Vec<u8> = (0..n).map(|i| u8::from(c[i] - 2.0 * lin[i] < 0.0)).collect();
        let y: Vec<f64> = bits.iter().map(|&b| f64::from(b) - 0.5).collect();
        let step = v.tr_mul_vec_raw(&y);
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi += h * si;
        }
        let f = sys.residual_norm_sq_raw(&x);
        if tracer.record(k + 1, l, &x, f, BinaryAssignment::from_bits_unchecked(bits)) {
            early = true;
            break;
        }
    }
    Ok(tracer.finish(x, early))
}

/// `A_qᵀ·A_q = V·H·Vᵀ` must be diagonal for the sign rule to be exact.
fn debug_assert_diagonal(a_q: &crate::linsys::DenseMatrix) {
    if cfg!(debug_assertions) {
        let g = crate::linsys::gram_counted(a_q, &mut 0);
        let n = g.rows();
        let diag = (0..n).map(|i| g[(i, i)].abs()).fold(0.0, f64::max);
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(g[(i, j)].abs());
                }
            }
        }
        debug_assert!(
            off <= 1e-8 * diag,
            "rhombus QUBO is not diagonal: off-diagonal {off:e} vs diagonal {diag:e}"
        );
    }
}
