//! Command-line surface. Every long flag of a subcommand can also be given
//! as `key=value` in the file passed to `--config`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qlinsolve::drivers::{Lattice, SnapshotPolicy};
use qlinsolve::solvers::SolverKind;

#[derive(Debug, Parser)]
#[command(
    name = "qlinsolve",
    version,
    about = "Solve dense linear systems by iterated QUBO minimisation",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded random system to matrix and vector files.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Gen(GenArgs),
    /// Run one driver and write its convergence CSV.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Solve(SolveArgs),
    /// Dump the conjugate (or block-conjugate) basis of a matrix.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Basis(BasisArgs),
    /// Sweep the shrink factor and write one CSV per run plus a summary.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Experiment(ExperimentArgs),
    /// Recompute f for the iterates logged next to a CSV report.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Square,
    Rhombus,
    Block,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Square => "square",
            Algo::Rhombus => "rhombus",
            Algo::Block => "block",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatticeArg {
    Corner,
    Centered,
}

impl From<LatticeArg> for Lattice {
    fn from(l: LatticeArg) -> Self {
        match l {
            LatticeArg::Corner => Lattice::Corner,
            LatticeArg::Centered => Lattice::Centered,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Timing {
    /// `elapsed_ms` is written as 0 so reruns give identical files.
    Off,
    /// Measured wall-clock milliseconds.
    Wall,
}

/// Initial edge length: a number, or `auto` for the rhombus bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LSpec {
    Auto,
    Value(f64),
}

impl FromStr for LSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(LSpec::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(LSpec::Value(v)),
            _ => Err("expected a positive number or `auto`".into()),
        }
    }
}

/// Shrink factors of an experiment sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep(pub Vec<f64>);

/// Comma-separated shrink factors, each `> 1`. An empty string is an
/// empty sweep.
pub fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let mut out: Vec<f64> = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let c: f64 = tok.parse().map_err(|_| format!("`{tok}` is not a number"))?;
        if !(c > 1.0 && c.is_finite()) {
            return Err(format!("sweep values must be > 1, got `{tok}`"));
        }
        if out.contains(&c) {
            return Err(format!("duplicate sweep value `{tok}`"));
        }
        out.push(c);
    }
    Ok(Sweep(out))
}

fn parse_shrink(s: &str) -> Result<f64, String> {
    let c: f64 = s.parse().map_err(|_| "not a number".to_string())?;
    if c > 1.0 && c.is_finite() {
        Ok(c)
    } else {
        Err("must be > 1".into())
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// key=value file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub lo: f64,
    #[arg(long, default_value_t = 200.0)]
    pub hi: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_matrix: PathBuf,
    #[arg(long)]
    pub out_rhs: PathBuf,
}

/// Where the system comes from: two files, or the seeded generator.
#[derive(Debug, Args)]
pub struct InstanceArgs {
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub rhs: Option<PathBuf>,
    /// Generate an N×N instance instead of reading files.
    #[arg(long)]
    pub gen_n: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub gen_lo: f64,
    #[arg(long, default_value_t = 200.0)]
    pub gen_hi: f64,
    #[arg(long, default_value_t = 0)]
    pub gen_seed: u64,
    /// Starting point (vector file); zeros when absent.
    #[arg(long)]
    pub x0: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value = "exhaustive")]
    pub solver: SolverKind,
    /// Base seed for the heuristic solvers.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub sa_sweeps: usize,
    #[arg(long, default_value_t = 4)]
    pub sa_restarts: usize,
    /// Inverse temperatures; both or neither.
    #[arg(long)]
    pub beta_initial: Option<f64>,
    #[arg(long)]
    pub beta_final: Option<f64>,
    #[arg(long, default_value_t = 8)]
    pub tabu_tenure: usize,
    #[arg(long, default_value_t = 2000)]
    pub tabu_moves: usize,
    #[arg(long, default_value_t = 4)]
    pub tabu_restarts: usize,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// key=value file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum, default_value_t = Algo::Rhombus)]
    pub algo: Algo,
    /// Initial edge length, or `auto` (rhombus only).
    #[arg(long = "L")]
    pub l: LSpec,
    #[arg(long, default_value_t = 2.0, value_parser = parse_shrink)]
    pub c: f64,
    #[arg(long, default_value_t = 50)]
    pub iters: usize,
    /// Bits per coordinate (square and block).
    #[arg(long = "R", default_value_t = 1)]
    pub r: usize,
    /// Square lattice placement.
    #[arg(long, value_enum, default_value_t = LatticeArg::Corner)]
    pub lattice: LatticeArg,
    /// Block sizes: `4,4,2` or `uniform:K`.
    #[arg(long)]
    pub blocks: Option<String>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Stop once f is at or below this value.
    #[arg(long)]
    pub early_stop: Option<f64>,
    /// Iterates written to the `.x.txt` sidecar: last, first-last, all.
    #[arg(long, default_value = "last")]
    pub snapshots: SnapshotPolicy,
    /// Worker threads for block sub-solves.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub block_threads: u64,
    #[arg(long, value_enum, default_value_t = Timing::Off)]
    pub timing: Timing,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Convergence CSV; the final iterate goes to the matching `.x.txt`.
    #[arg(long)]
    pub out: PathBuf,
    /// Also draw f against the iteration count (log scale).
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, default_value = "solve")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Shrink factors to run, e.g. `1.2,1.5`; empty means just `--c`.
    #[arg(long, value_parser = parse_sweep)]
    pub sweep: Option<Sweep>,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Prefix of each run id.
    #[arg(long, default_value = "run")]
    pub name: String,
    /// Sweep points run in parallel.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
    /// Write an SVG chart next to every CSV.
    #[arg(long)]
    pub svg: bool,
    /// Defaults to `summary.txt` in the output directory.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub matrix: PathBuf,
    /// Block sizes; the fully conjugate basis when absent.
    #[arg(long)]
    pub blocks: Option<String>,
    /// V, one direction per row.
    #[arg(long)]
    pub out: PathBuf,
    /// Block-diagonal `V·H·Vᵀ` restricted to the blocks.
    #[arg(long)]
    pub out_gram: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub rhs: PathBuf,
    /// Iterate file; defaults to the report's `.x.txt` sidecar.
    #[arg(long)]
    pub x: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}
