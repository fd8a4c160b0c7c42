use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::encode::BinaryAssignment;
use crate::error::{Error, Result};
use crate::linsys::Vector;

/// Which iterates a report keeps in full.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnapshotPolicy {
    #[default]
    Last,
    FirstAndLast,
    All,
}

impl FromStr for SnapshotPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "last" => Ok(Self::Last),
            "first-last" | "first-and-last" => Ok(Self::FirstAndLast),
            "all" => Ok(Self::All),
            other => Err(Error::InvalidParameter(format!(
                "unknown snapshot policy `{other}` (last, first-last, all)"
            ))),
        }
    }
}

impl fmt::Display for SnapshotPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Last => "last",
            Self::FirstAndLast => "first-last",
            Self::All => "all",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationParams {
    pub l_initial: f64,
    /// Shrink factor, `> 1`.
    pub c: f64,
    pub n_iter: usize,
    /// Bits per coordinate (ignored by the rhombus driver, which uses 1).
    pub r_bits: usize,
    /// Stop as soon as `f ≤ early_stop_f`.
    pub early_stop_f: Option<f64>,
    pub snapshots: SnapshotPolicy,
}

impl IterationParams {
    pub fn new(l_initial: f64, c: f64, n_iter: usize, r_bits: usize) -> Result<Self> {
        let p = Self {
            l_initial,
            c,
            n_iter,
            r_bits,
            early_stop_f: None,
            snapshots: SnapshotPolicy::Last,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_early_stop(mut self, f: f64) -> Self {
        self.early_stop_f = Some(f);
        self
    }

    pub fn with_snapshots(mut self, policy: SnapshotPolicy) -> Self {
        self.snapshots = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.l_initial > 0.0 && self.l_initial.is_finite()) {
            return bad(format!("L must be positive and finite, got {}", self.l_initial));
        }
        if !(self.c > 1.0 && self.c.is_finite()) {
            return bad(format!("c must be > 1, got {}", self.c));
        }
        if self.n_iter == 0 {
            return bad("iteration count must be >= 1".into());
        }
        if self.r_bits == 0 {
            return bad("R must be >= 1".into());
        }
        if let Some(t) = self.early_stop_f {
            if !(t >= 0.0) {
                return bad(format!("early-stop threshold must be >= 0, got {t}"));
            }
        }
        Ok(())
    }

    /// `L` used at each iteration: `l_initial`, then repeated division by `c`.
    pub fn l_schedule(&self) -> Vec<f64> {
        let mut l = self.l_initial;
        (0..self.n_iter)
            .map(|_| {
                let cur = l;
                l /= self.c;
                cur
            })
            .collect()
    }
}

/// One iteration: `l` is the edge length used to build it and `f` the
/// residual after the move.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: usize,
    pub l: f64,
    pub f: f64,
    pub bits: BinaryAssignment,
    /// Since the start of the solve.
    pub elapsed: Duration,
    /// `f` went up compared to the previous iterate (possible with
    /// heuristic solvers).
    pub regressed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub iteration: usize,
    pub x: Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    EarlyStop,
    IterationBudget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub records: Vec<IterationRecord>,
    pub snapshots: Vec<Snapshot>,
    pub x_star: Vector,
    /// `f(x0)`.
    pub f_initial: f64,
    pub converged: bool,
    pub stop: StopReason,
}

impl SolveReport {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn final_f(&self) -> f64 {
        self.records.last().map_or(self.f_initial, |r| r.f)
    }

    pub fn f_trace(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.f).collect()
    }

    /// First iteration whose `f` is at or below `threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.f <= threshold)
            .map(|r| r.iteration)
    }

    pub fn regressions(&self) -> usize {
        self.records.iter().filter(|r| r.regressed).count()
    }
}

pub(crate) struct Tracer {
    params: IterationParams,
    start: Instant,
    records: Vec<IterationRecord>,
    snapshots: Vec<Snapshot>,
    f_initial: f64,
    f_prev: f64,
}

impl Tracer {
    pub fn new(params: &IterationParams, f_initial: f64) -> Self {
        Self {
            params: *params,
            start: Instant::now(),
            records: Vec::with_capacity(params.n_iter),
            snapshots: Vec::new(),
            f_initial,
            f_prev: f_initial,
        }
    }

    /// Records iteration `iteration` and reports whether to stop.
    pub fn record(&mut self, iteration: usize, l: f64, x: &[f64], f: f64, bits: BinaryAssignment) -> bool {
        let keep = match self.params.snapshots {
            SnapshotPolicy::All => true,
            SnapshotPolicy::FirstAndLast => iteration == 1,
            SnapshotPolicy::Last => false,
        };
        if keep {
            self.snapshots.push(Snapshot {
                iteration,
                x: Vector::from_vec_unchecked(x.to_vec()),
            });
        }
        self.records.push(IterationRecord {
            iteration,
            l,
            f,
            bits,
            elapsed: self.start.elapsed(),
            regressed: f > self.f_prev,
        });
        self.f_prev = f;
        self.params.early_stop_f.is_some_and(|t| f <= t)
    }

    pub fn finish(mut self, x: Vec<f64>, early: bool) -> SolveReport {
        let last = self.records.last().map_or(0, |r| r.iteration);
        if self.snapshots.last().is_none_or(|s| s.iteration != last) {
            self.snapshots.push(Snapshot {
                iteration: last,
                x: Vector::from_vec_unchecked(x.clone()),
            });
        }
        SolveReport {
            records: self.records,
            snapshots: self.snapshots,
            x_star: Vector::from_vec_unchecked(x),
            f_initial: self.f_initial,
            converged: early,
            stop: if early {
                StopReason::EarlyStop
            } else {
                StopReason::IterationBudget
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_is_repeated_division() {
        let p = IterationParams::new(100.0, 1.1, 300, 3).unwrap();
        let sched = p.l_schedule();
        let mut l = 100.0f64;
        for &s in &sched {
            assert_eq!(s.to_bits(), l.to_bits());
            l /= 1.1;
        }
        assert_eq!(sched.len(), 300);
    }

    #[test]
    fn parameter_validation() {
        assert!(IterationParams::new(1.0, 1.0, 10, 1).is_err());
        assert!(IterationParams::new(0.0, 2.0, 10, 1).is_err());
        assert!(IterationParams::new(1.0, 2.0, 0, 1).is_err());
        assert!(IterationParams::new(1.0, 2.0, 1, 0).is_err());
        let p = IterationParams::new(1.0, 2.0, 1, 1).unwrap().with_early_stop(-1.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn snapshot_policy_round_trip() {
        for p in [SnapshotPolicy::Last, SnapshotPolicy::FirstAndLast, SnapshotPolicy::All] {
            assert_eq!(p.to_string().parse::<SnapshotPolicy>().unwrap(), p);
        }
        assert!("some".parse::<SnapshotPolicy>().is_err());
    }
}
