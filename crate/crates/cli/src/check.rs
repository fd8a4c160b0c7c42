//! Replays a report: every iterate in the sidecar must reproduce the `f`
//! logged for its iteration, and the last one must be the final row.

use std::collections::BTreeMap;
use std::path::Path;

use qlinsolve::linsys::LinearSystem;

use crate::error::CliError;
use crate::output::CSV_HEADER;

pub struct CheckSummary {
    pub iterates: usize,
    pub max_rel: f64,
}

fn bad(path: &Path, line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Check(format!("{}:{line}: {msg}", path.display()))
}

/// `iter → f` from a report CSV.
pub fn parse_csv(text: &str, path: &Path) -> Result<BTreeMap<usize, f64>, CliError> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(bad(path, 1, format!("expected header `{CSV_HEADER}`")));
    }
    let mut out = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        let row = || bad(path, i + 2, format!("malformed row `{line}`"));
        if cols.len() != 4 {
            return Err(row());
        }
        let iter: usize = cols[0].parse().map_err(|_| row())?;
        let f: f64 = cols[2].parse().map_err(|_| row())?;
        out.insert(iter, f);
    }
    if out.is_empty() {
        return Err(bad(path, 1, "no data rows"));
    }
    Ok(out)
}

pub fn parse_sidecar(text: &str, path: &Path, n: usize) -> Result<Vec<(usize, Vec<f64>)>, CliError> {
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            let row = || bad(path, i + 1, "expected an iteration number and the coordinates");
            let mut toks = line.split(' ');
            let iter: usize = toks.next().and_then(|t| t.parse().ok()).ok_or_else(row)?;
            let x = toks.map(|t| t.parse::<f64>()).collect::<Result<Vec<_>, _>>().map_err(|_| row())?;
            if x.len() != n {
                return Err(bad(path, i + 1, format!("{} coordinates for a system of size {n}", x.len())));
            }
            Ok((iter, x))
        })
        .collect()
}

pub fn check(
    sys: &LinearSystem,
    csv: &str,
    csv_path: &Path,
    sidecar: &str,
    sidecar_path: &Path,
    tol: f64,
) -> Result<CheckSummary, CliError> {
    let logged = parse_csv(csv, csv_path)?;
    let iterates = parse_sidecar(sidecar, sidecar_path, sys.dim())?;
    let last = *logged.keys().next_back().expect("non-empty");
    match iterates.last() {
        Some((k, _)) if *k == last => {}
        _ => return Err(CliError::Check(format!("the final iterate (iteration {last}) is not in the sidecar"))),
    }
    let mut max_rel = 0.0f64;
    for (k, x) in &iterates {
        let f_log = *logged
            .get(k)
            .ok_or_else(|| CliError::Check(format!("iteration {k} has no CSV row")))?;
        let f = sys.residual_norm_sq(x)?;
        let rel = (f_log - f).abs() / f.abs().max(f64::MIN_POSITIVE);
        if rel > tol {
            return Err(CliError::Check(format!(
                "iteration {k}: logged f {f_log:e}, recomputed {f:e} (relative {rel:e})"
            )));
        }
        max_rel = max_rel.max(rel);
    }
    Ok(CheckSummary {
        iterates: iterates.len(),
        max_rel,
    })
}
