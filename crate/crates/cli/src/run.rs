use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use qlinsolve::drivers::{
    solve_block_with, solve_rhombus_with_basis, solve_square_with, suggest_l_with_basis,
    BlockOptions, IterationParams, Lattice, SolveReport, SnapshotPolicy,
};
use qlinsolve::geometry::{block_conjugate_basis, conjugate_basis, Composition};
use qlinsolve::linsys::{io, random_instance, DenseMatrix, LinearSystem, Vector};
use qlinsolve::solvers::{SaParams, SolverSpec, TabuParams};

use crate::cli::{Algo, LSpec, RunArgs, SolverArgs};
use crate::error::CliError;

pub fn read_matrix(path: &Path) -> Result<DenseMatrix, CliError> {
    let f = File::open(path).map_err(CliError::io(path))?;
    io::read_matrix(BufReader::new(f)).map_err(CliError::input(path))
}

pub fn read_vector(path: &Path) -> Result<Vector, CliError> {
    let f = File::open(path).map_err(CliError::io(path))?;
    io::read_vector(BufReader::new(f)).map_err(CliError::input(path))
}

pub fn read_system(matrix: &Path, rhs: &Path) -> Result<LinearSystem, CliError> {
    LinearSystem::new(read_matrix(matrix)?, read_vector(rhs)?).map_err(CliError::input(rhs))
}

pub struct Instance {
    pub sys: LinearSystem,
    pub x0: Vec<f64>,
}

impl Instance {
    pub fn load(args: &RunArgs) -> Result<Self, CliError> {
        let src = &args.instance;
        let sys = match (&src.matrix, &src.rhs, src.gen_n) {
            (Some(a), Some(b), None) => read_system(a, b)?,
            (None, None, Some(n)) => random_instance(n, src.gen_lo, src.gen_hi, src.gen_seed)?,
            _ => {
                return Err(CliError::Usage(
                    "give either --matrix and --rhs, or --gen-n".into(),
                ))
            }
        };
        let x0 = match &src.x0 {
            Some(p) => {
                let v = read_vector(p)?;
                if v.len() != sys.dim() {
                    return Err(CliError::Usage(format!(
                        "--x0 has {} entries, the system has {}",
                        v.len(),
                        sys.dim()
                    )));
                }
                v.to_vec()
            }
            None => vec![0.0; sys.dim()],
        };
        Ok(Self { sys, x0 })
    }
}

fn solver_spec(s: &SolverArgs) -> Result<SolverSpec, CliError> {
    let beta = match (s.beta_initial, s.beta_final) {
        (Some(b0), Some(b1)) => Some((b0, b1)),
        (None, None) => None,
        _ => return Err(CliError::Usage("--beta-initial and --beta-final go together".into())),
    };
    let cfg = SolverSpec {
        kind: s.solver,
        seed: s.seed,
        sa: SaParams {
            sweeps: s.sa_sweeps,
            restarts: s.sa_restarts,
            beta,
        },
        tabu: TabuParams {
            tenure: s.tabu_tenure,
            max_moves: s.tabu_moves,
            restarts: s.tabu_restarts,
        },
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

/// Everything about a run except the shrink factor, checked against the
/// system size.
#[derive(Debug, Clone)]
pub struct Plan {
    pub algo: Algo,
    pub l: LSpec,
    pub iters: usize,
    pub r: usize,
    pub early_stop: Option<f64>,
    pub snapshots: SnapshotPolicy,
    pub composition: Option<Composition>,
    pub solver: SolverSpec,
    pub lattice: Lattice,
    pub threads: usize,
}

impl Plan {
    pub fn new(args: &RunArgs, n: usize) -> Result<Self, CliError> {
        let composition = match (args.algo, &args.blocks) {
            (Algo::Block, Some(s)) => Some(
                Composition::parse_for(s, n).map_err(|e| CliError::Usage(format!("--blocks: {e}")))?,
            ),
            (Algo::Block, None) => return Err(CliError::Usage("--algo block needs --blocks".into())),
            (_, Some(_)) => {
                return Err(CliError::Usage("--blocks only applies to --algo block".into()))
            }
            (_, None) => None,
        };
        if args.l == LSpec::Auto && args.algo != Algo::Rhombus {
            return Err(CliError::Usage("--L auto is only available with --algo rhombus".into()));
        }
        if args.iters == 0 || args.r == 0 {
            return Err(CliError::Usage("--iters and --R must be at least 1".into()));
        }
        Ok(Self {
            algo: args.algo,
            l: args.l,
            iters: args.iters,
            r: args.r,
            early_stop: args.early_stop,
            snapshots: args.snapshots,
            composition,
            solver: solver_spec(&args.solver)?,
            lattice: args.lattice.into(),
            threads: args.block_threads as usize,
        })
    }

    fn params(&self, l: f64, c: f64) -> qlinsolve::Result<IterationParams> {
        let p = IterationParams::new(l, c, self.iters, self.r)?.with_snapshots(self.snapshots);
        Ok(match self.early_stop {
            Some(t) => p.with_early_stop(t),
            None => p,
        })
    }

    fn fixed_l(&self) -> f64 {
        match self.l {
            LSpec::Value(v) => v,
            LSpec::Auto => unreachable!("auto L is resolved by the rhombus branch"),
        }
    }

    pub fn run(&self, inst: &Instance, c: f64) -> qlinsolve::Result<SolveReport> {
        let (sys, x0) = (&inst.sys, inst.x0.as_slice());
        match self.algo {
            Algo::Square => {
                let params = self.params(self.fixed_l(), c)?;
                solve_square_with(sys, x0, &params, &self.solver, self.lattice)
            }
            Algo::Rhombus => {
                let basis = conjugate_basis(sys.a())?;
                let l = match self.l {
                    LSpec::Auto => suggest_l_with_basis(sys, &basis, x0)?,
                    LSpec::Value(v) => v,
                };
                solve_rhombus_with_basis(sys, &basis, x0, &self.params(l, c)?)
            }
            Algo::Block => {
                let comp = self.composition.as_ref().expect("block plan has a composition");
                let basis = block_conjugate_basis(sys.a(), comp)?;
                let options = BlockOptions { threads: self.threads };
                solve_block_with(sys, &basis, x0, &self.params(self.fixed_l(), c)?, &self.solver, &options)
            }
        }
    }
}
