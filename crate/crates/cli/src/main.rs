mod check;
mod cli;
mod config;
mod error;
mod output;
mod run;

use std::path::Path;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::Parser;
use qlinsolve::drivers::SolveReport;
use qlinsolve::geometry::{block_conjugate_basis, conjugate_basis, Composition};
use qlinsolve::linsys::{gram_matrix, io, random_instance, DenseMatrix};

use cli::{BasisArgs, CheckArgs, Cli, Command, ExperimentArgs, GenArgs, SolveArgs};
use error::CliError;
use run::{Instance, Plan};

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("qlinsolve: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Basis(a) => basis(a),
        Command::Experiment(a) => experiment(a),
        Command::Check(a) => check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qlinsolve: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn gen(a: GenArgs) -> Result<(), CliError> {
    let sys = random_instance(a.n, a.lo, a.hi, a.seed)?;
    output::write(&a.out_matrix, &io::matrix_to_string(sys.a()))?;
    output::write(&a.out_rhs, &io::vector_to_string(sys.b()))
}

fn write_report(
    csv_path: &Path,
    report: &SolveReport,
    args: &cli::RunArgs,
    svg: Option<(&Path, &str)>,
) -> Result<(), CliError> {
    output::write(csv_path, &output::csv(report, args.timing))?;
    output::write(&output::sidecar_path(csv_path), &output::sidecar(report))?;
    if let Some((path, title)) = svg {
        output::write(path, &output::svg(title, report))?;
    }
    Ok(())
}

fn solve(a: SolveArgs) -> Result<(), CliError> {
    let inst = Instance::load(&a.run)?;
    let plan = Plan::new(&a.run, inst.sys.dim())?;
    let report = plan.run(&inst, a.run.c)?;
    let svg = a.svg.as_deref().map(|p| (p, a.name.as_str()));
    write_report(&a.out, &report, &a.run, svg)?;
    println!("{}", output::summary_line(&a.name, &Ok(report)));
    Ok(())
}

/// Runs every shrink factor, `jobs` at a time, keeping sweep order.
fn run_sweep(inst: &Instance, plan: &Plan, cs: &[f64], jobs: usize) -> Vec<Result<SolveReport, String>> {
    let one = |c: f64| plan.run(inst, c).map_err(|e| e.to_string());
    if jobs <= 1 || cs.len() <= 1 {
        return cs.iter().map(|&c| one(c)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<SolveReport, String>>>> = Mutex::new(vec![None; cs.len()]);
    std::thread::scope(|s| {
        for _ in 0..jobs.min(cs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cs.len() {
                    break;
                }
                let r = one(cs[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every sweep point ran"))
        .collect()
}

fn experiment(a: ExperimentArgs) -> Result<(), CliError> {
    let inst = Instance::load(&a.run)?;
    let plan = Plan::new(&a.run, inst.sys.dim())?;
    let cs = match &a.sweep {
        Some(cli::Sweep(v)) if !v.is_empty() => v.clone(),
        _ => vec![a.run.c],
    };
    std::fs::create_dir_all(&a.out_dir).map_err(CliError::io(&a.out_dir))?;

    let results = run_sweep(&inst, &plan, &cs, a.jobs as usize);
    let mut summary = String::new();
    let mut failed = 0;
    for (c, result) in cs.iter().zip(results) {
        let name = format!("{}_{}_c{c}", a.name, a.run.algo);
        let csv_path = a.out_dir.join(format!("{name}.csv"));
        let svg_path = a.out_dir.join(format!("{name}.svg"));
        let result = result.and_then(|report| {
            let svg = a.svg.then_some((svg_path.as_path(), name.as_str()));
            write_report(&csv_path, &report, &a.run, svg)
                .map(|()| report)
                .map_err(|e| e.to_string())
        });
        failed += usize::from(result.is_err());
        let line = output::summary_line(&name, &result);
        println!("{line}");
        summary.push_str(&line);
        summary.push('\n');
    }
    let summary_path = a.summary.unwrap_or_else(|| a.out_dir.join("summary.txt"));
    output::write(&summary_path, &summary)?;
    if failed > 0 {
        return Err(CliError::RunsFailed {
            failed,
            total: cs.len(),
        });
    }
    Ok(())
}

/// Largest `|(V·H·Vᵀ)_ij|` outside the diagonal blocks, relative to the
/// largest diagonal entry.
fn off_block_coupling(gram: &DenseMatrix, comp: &Composition) -> f64 {
    let block_of: Vec<usize> = comp
        .sizes()
        .iter()
        .enumerate()
        .flat_map(|(k, &s)| std::iter::repeat_n(k, s))
        .collect();
    let n = gram.rows();
    let diag = (0..n).map(|i| gram[(i, i)].abs()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if block_of[i] != block_of[j] {
                worst = worst.max(gram[(i, j)].abs());
            }
        }
    }
    if diag > 0.0 {
        worst / diag
    } else {
        worst
    }
}

fn basis(a: BasisArgs) -> Result<(), CliError> {
    let m = run::read_matrix(&a.matrix)?;
    let n = m.rows();
    let (v, blocks, comp) = match &a.blocks {
        None => {
            let (v, c) = conjugate_basis(&m)?.into_parts();
            let blocks: Vec<DenseMatrix> = c
                .iter()
                .map(|&cj| DenseMatrix::from_rows(&[vec![cj]]))
                .collect::<qlinsolve::Result<_>>()?;
            (v, blocks, Composition::singletons(n)?)
        }
        Some(s) => {
            let comp =
                Composition::parse_for(s, n).map_err(|e| CliError::Usage(format!("--blocks: {e}")))?;
            let b = block_conjugate_basis(&m, &comp)?;
            (b.v().clone(), b.blocks().to_vec(), comp)
        }
    };
    output::write(&a.out, &io::matrix_to_string(&v))?;
    if let Some(path) = &a.out_gram {
        let mut g = DenseMatrix::zeros(n, n);
        for (blk, start) in blocks.iter().zip(comp.offsets()) {
            for r in 0..blk.rows() {
                for c in 0..blk.cols() {
                    g[(start + r, start + c)] = blk[(r, c)];
                }
            }
        }
        output::write(path, &io::matrix_to_string(&g))?;
    }
    let full = gram_matrix(&m.mul_transpose(&v)?)?;
    println!(
        "dim={n} blocks={comp} coupling={}",
        io::format_real(off_block_coupling(&full, &comp))
    );
    Ok(())
}

fn check(a: CheckArgs) -> Result<(), CliError> {
    let sys = run::read_system(&a.matrix, &a.rhs)?;
    let x_path = a.x.unwrap_or_else(|| output::sidecar_path(&a.report));
    let csv = std::fs::read_to_string(&a.report).map_err(CliError::io(&a.report))?;
    let sidecar = std::fs::read_to_string(&x_path).map_err(CliError::io(&x_path))?;
    let s = check::check(&sys, &csv, &a.report, &sidecar, &x_path, a.tol)?;
    println!(
        "check ok: {} iterates, max relative deviation {}",
        s.iterates,
        io::format_real(s.max_rel)
    );
    Ok(())
}
