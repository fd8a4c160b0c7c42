//! Report files: the convergence CSV, the `.x.txt` iterate sidecar, summary
//! lines and an optional SVG chart.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qlinsolve::drivers::SolveReport;
use qlinsolve::linsys::io::format_real;

use crate::cli::Timing;
use crate::error::CliError;

pub const CSV_HEADER: &str = "iter,L,f,elapsed_ms";

pub fn csv(report: &SolveReport, timing: Timing) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in &report.records {
        let ms = match timing {
            Timing::Off => "0".to_string(),
            Timing::Wall => format!("{:.3}", r.elapsed.as_secs_f64() * 1e3),
        };
        let _ = writeln!(out, "{},{},{},{ms}", r.iteration, format_real(r.l), format_real(r.f));
    }
    out
}

/// `run.csv` → `run.x.txt`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("x.txt")
}

/// One line per kept iterate: the iteration number, then the coordinates.
pub fn sidecar(report: &SolveReport) -> String {
    let mut out = String::new();
    for s in &report.snapshots {
        let _ = write!(out, "{}", s.iteration);
        for v in s.x.iter() {
            let _ = write!(out, " {}", format_real(*v));
        }
        out.push('\n');
    }
    out
}

pub fn summary_line(name: &str, outcome: &Result<SolveReport, String>) -> String {
    match outcome {
        Ok(r) => format!(
            "name={name} final_f={} iters={} status=ok",
            format_real(r.final_f()),
            r.iterations()
        ),
        Err(msg) => {
            let msg = msg.replace(['\n', '\r'], " ");
            format!("name={name} final_f=nan iters=0 status=error:{msg}")
        }
    }
}

pub fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(CliError::io(path))
}

/// Polyline of `log10 f` against the iteration number.
pub fn svg(title: &str, report: &SolveReport) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 60.0;
    let tiny = report
        .records
        .iter()
        .map(|r| r.f)
        .filter(|f| *f > 0.0)
        .fold(f64::INFINITY, f64::min);
    let tiny = if tiny.is_finite() { tiny } else { 1e-300 };
    let pts: Vec<(f64, f64)> = report
        .records
        .iter()
        .map(|r| (r.iteration as f64, r.f.max(tiny).log10()))
        .collect();
    let (x_lo, x_hi) = (1.0, pts.last().map_or(1.0, |p| p.0).max(2.0));
    let y_lo = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).floor();
    let y_hi = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max).ceil();
    let (y_lo, y_hi) = if y_lo.is_finite() && y_hi > y_lo { (y_lo, y_hi) } else { (0.0, 1.0) };
    let sx = |x: f64| M + (x - x_lo) / (x_hi - x_lo) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y_lo) / (y_hi - y_lo) * (H - 2.0 * M);

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    );
    let _ = writeln!(out, "<rect x=\"{M}\" y=\"{M}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>", W - 2.0 * M, H - 2.0 * M);
    let _ = writeln!(out, "<text x=\"{}\" y=\"30\" text-anchor=\"middle\">{}</text>", W / 2.0, escape(title));
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">1e{y_hi}</text>", M - 5.0, M + 5.0);
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">1e{y_lo}</text>", M - 5.0, H - M);
    let _ = writeln!(out, "<text x=\"{M}\" y=\"{}\">{x_lo}</text>", H - M + 20.0);
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{x_hi}</text>", W - M, H - M + 20.0);
    out.push_str("<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"");
    for (i, (x, y)) in pts.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{:.2},{:.2}", sx(*x), sy(*y));
    }
    out.push_str("\"/>\n</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
