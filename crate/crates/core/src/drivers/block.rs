use super::report::Tracer;
use super::{subproblem_seed, IterationParams, SolveReport};
use crate::encode::{bit_weights, bits_to_xhat, BinaryAssignment, QuboProblem};
use crate::error::{Error, Result};
use crate::geometry::{block_conjugate_basis, BlockBasis, Composition};
use crate::linsys::{ensure_len, DenseMatrix, LinearSystem};
use crate::solvers::{solve_qubo, SolveOutcome, SolverSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockOptions {
    /// Worker threads for the per-iteration sub-solves (1 = inline).
    pub threads: usize,
}

impl Default for BlockOptions {
    fn default() -> Self {
        Self { threads: 1 }
    }
}

/// Block driver: one independent QUBO per block of the composition.
pub fn solve_block(
    sys: &LinearSystem,
    x0: &[f64],
    params: &IterationParams,
    composition: &Composition,
    solver: &SolverSpec,
) -> Result<SolveReport> {
    let basis = block_conjugate_basis(sys.a(), composition)?;
    solve_block_with(sys, &basis, x0, params, solver, &BlockOptions::default())
}

pub fn solve_block_with(
    sys: &LinearSystem,
    basis: &BlockBasis,
    x0: &[f64],
    params: &IterationParams,
    solver: &SolverSpec,
    options: &BlockOptions,
) -> Result<SolveReport> {
    let order: Vec<usize> = (0..basis.composition().len()).collect();
    run(sys, basis, x0, params, solver, options, &order)
}

/// Sub-QUBO matrices `Q₀⁽ʲ⁾ = Wᵀ·H_j·W`, `W = I ⊗ w`.
fn base_blocks(basis: &BlockBasis, w: &[f64]) -> Vec<DenseMatrix> {
    let r = w.len();
    basis
        .blocks()
        .iter()
        .map(|hj| {
            let a = hj.rows();
            let mut q = DenseMatrix::zeros(a * r, a * r);
            for i in 0..a {
                for k in 0..a {
                    let hik = hj[(i, k)];
                    for (s, &ws) in w.iter().enumerate() {
                        for (t, &wt) in w.iter().enumerate() {
                            q[(i * r + s, k * r + t)] = ws * hik * wt;
                        }
                    }
                }
            }
            q
        })
        .collect()
}

fn run(
    sys: &LinearSystem,
    basis: &BlockBasis,
    x0: &[f64],
    params: &IterationParams,
    solver: &SolverSpec,
    options: &BlockOptions,
    order: &[usize],
) -> Result<SolveReport> {
    params.validate()?;
    solver.validate()?;
    let n = sys.dim();
    ensure_len("block driver (x0)", n, x0.len())?;
    ensure_len("block driver (basis)", n, basis.dim())?;
    let r = params.r_bits;
    let w = bit_weights(r);
    let v = basis.v();
    let a = sys.a();
    let offsets = basis.composition().offsets();
    let sizes = basis.composition().sizes().to_vec();
    let q0 = base_blocks(basis, &w);
    let av_ones = a.mul_vec_raw(&v.tr_mul_vec_raw(&vec![1.0; n]));

    let mut x = x0.to_vec();
    let mut tracer = Tracer::new(params, sys.residual_norm_sq_raw(&x));
    let mut early = false;
    for (k, &l) in params.l_schedule().iter().enumerate() {
        let iteration = k + 1;
        let h = l / 2.0;
        let a_x = a.mul_vec_raw(&x);
        let b_q: Vec<f64> = (0..n)
            .map(|i| (sys.b()[i] + h / 2.0 * av_ones[i] - a_x[i]) / h)
            .collect();
        // A_qᵀ·b_q restricted to coordinate i, bit s is w_s·(V·Aᵀ·b_q)_i.
        let lin = v.mul_vec_raw(&a.tr_mul_vec_raw(&b_q));

        let problems: Vec<QuboProblem> = (0..sizes.len())
            .map(|j| {
                let mut q = q0[j].clone();
                for i in 0..sizes[j] {
                    for (s, &ws) in w.iter().enumerate() {
                        let d = i * r + s;
                        q[(d, d)] -= 2.0 * (ws * lin[offsets[j] + i]);
                    }
                }
                QuboProblem::from_matrix(q)
            })
            .collect::<Result<_>>()?;
        let outcomes = solve_all(&problems, solver, iteration, options.threads, order)?;

        let mut bits = Vec::with_capacity(n * r);
        for out in outcomes {
            bits.extend_from_slice(out.q.bits());
        }
        let q = BinaryAssignment::from_bits_unchecked(bits);
        let xhat = bits_to_xhat(&q, n, r)?;
        let y: Vec<f64> = xhat.iter().map(|v| v - 0.5).collect();
        let step = v.tr_mul_vec_raw(&y);
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi += h * si;
        }
        let f = sys.residual_norm_sq_raw(&x);
        if tracer.record(iteration, l, &x, f, q) {
            early = true;
            break;
        }
    }
    Ok(tracer.finish(x, early))
}

/// Solves every block, visiting them in `order`, and returns the outcomes
/// by block index. The first failing block (by index) is reported.
fn solve_all(
    problems: &[QuboProblem],
    solver: &SolverSpec,
    iteration: usize,
    threads: usize,
    order: &[usize],
) -> Result<Vec<SolveOutcome>> {
    let solve_one = |j: usize| {
        let cfg = solver.reseeded(subproblem_seed(solver.seed, iteration, j));
        solve_qubo(&problems[j], &cfg)
    };
    let mut slots: Vec<Option<Result<SolveOutcome>>> = (0..problems.len()).map(|_| None).collect();
    if threads <= 1 || problems.len() <= 1 {
        for &j in order {
            slots[j] = Some(solve_one(j));
        }
    } else {
        let chunk = order.len().div_ceil(threads);
        let results: Vec<Vec<(usize, Result<SolveOutcome>)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = order
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(|&j| (j, solve_one(j))).collect()))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("block solver thread panicked"))
                .collect()
        });
        for (j, res) in results.into_iter().flatten() {
            slots[j] = Some(res);
        }
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(j, slot)| {
            slot.expect("every block solved").map_err(|e| Error::Block {
                block: j,
                source: Box::new(e),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsys::random_instance;
    use crate::solvers::SaParams;

    #[test]
    fn solve_order_and_threads_do_not_change_iterates() {
        let sys = random_instance(12, 0.0, 200.0, 5).unwrap();
        let comp = Composition::uniform(12, 4).unwrap();
        let basis = block_conjugate_basis(sys.a(), &comp).unwrap();
        let params = IterationParams::new(50.0, 1.3, 15, 2).unwrap();
        let solver = SolverSpec::annealing(9, SaParams { sweeps: 50, restarts: 2, beta: None });
        let x0 = vec![0.0; 12];
        let one = BlockOptions { threads: 1 };
        let forward = run(&sys, &basis, &x0, &params, &solver, &one, &[0, 1, 2]).unwrap();
        let reverse = run(&sys, &basis, &x0, &params, &solver, &one, &[2, 1, 0]).unwrap();
        let threaded =
            solve_block_with(&sys, &basis, &x0, &params, &solver, &BlockOptions { threads: 3 })
                .unwrap();
        assert_eq!(forward.x_star, reverse.x_star);
        assert_eq!(forward.x_star, threaded.x_star);
        assert_eq!(forward.f_trace(), threaded.f_trace());
    }

    #[test]
    fn block_errors_name_the_block() {
        let sys = random_instance(30, 0.0, 200.0, 1).unwrap();
        let comp = Composition::new(vec![5, 25]).unwrap();
        let params = IterationParams::new(10.0, 1.5, 2, 1).unwrap();
        let err = solve_block(&sys, &vec![0.0; 30], &params, &comp, &SolverSpec::exhaustive())
            .unwrap_err();
        match err {
            Error::Block { block, source } => {
                assert_eq!(block, 1);
                assert!(matches!(*source, Error::ProblemTooLarge { dim: 25, .. }));
            }
            other => panic!("unexpected error {other}"),
        }
    }
}
