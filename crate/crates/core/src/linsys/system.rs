use super::lu::LuFactor;
use super::matrix::{dot, ensure_len, DenseMatrix, Vector};
use super::rng::InstanceRng;
use crate::error::{Error, Result};

/// A square system `A·x = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    a: DenseMatrix,
    b: Vector,
}

impl LinearSystem {
    pub fn new(a: DenseMatrix, b: Vector) -> Result<Self> {
        ensure_len("linear system (square matrix)", a.rows(), a.cols())?;
        ensure_len("linear system right-hand side", a.rows(), b.len())?;
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `‖A·x − b‖²`.
    pub fn residual_norm_sq(&self, x: &[f64]) -> Result<f64> {
        ensure_len("residual", self.dim(), x.len())?;
        Ok(self.residual_norm_sq_raw(x))
    }

    pub(crate) fn residual_norm_sq_raw(&self, x: &[f64]) -> f64 {
        (0..self.dim())
            .map(|i| {
                let r = dot(self.a.row(i), x) - self.b[i];
                r * r
            })
            .sum()
    }

    /// `b − A·x`.
    pub(crate) fn residual_raw(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.b[i] - dot(self.a.row(i), x))
            .collect()
    }
}

/// Free-function form of [`LinearSystem::residual_norm_sq`].
pub fn residual_norm_sq(sys: &LinearSystem, x: &[f64]) -> Result<f64> {
    sys.residual_norm_sq(x)
}

/// `H = AᵀA`, accumulated over the upper triangle and mirrored, so the
/// result is exactly symmetric.
pub fn gram_matrix(a: &DenseMatrix) -> Result<DenseMatrix> {
    ensure_len("gram matrix (square)", a.rows(), a.cols())?;
    Ok(gram_counted(a, &mut 0))
}

pub(crate) fn gram_counted(a: &DenseMatrix, ops: &mut u64) -> DenseMatrix {
    let n = a.cols();
    let mut h = vec![0.0; n * n];
    for k in 0..a.rows() {
        let row = a.row(k);
        for i in 0..n {
            let aki = row[i];
            if aki == 0.0 {
                continue;
            }
            let hrow = &mut h[i * n..(i + 1) * n];
            for j in i..n {
                hrow[j] += aki * row[j];
            }
            *ops += (n - i) as u64;
        }
    }
    for i in 0..n {
        for j in 0..i {
            h[i * n + j] = h[j * n + i];
        }
    }
    DenseMatrix::from_row_major_unchecked(n, n, h)
}

/// Pivot threshold (relative to `max|A|`) below which a generated matrix
/// counts as singular.
pub const SINGULAR_PIVOT_TOL: f64 = 1e-10;

/// Number of draws attempted before [`random_instance`] gives up.
pub const INSTANCE_ATTEMPTS: usize = 8;

/// Generates `A` (row-major) then `b`, all entries i.i.d. uniform on
/// `[lo, hi)`, from a single [`InstanceRng`] stream seeded with `seed`.
/// A draw whose elimination meets a pivot below `1e-10·max|A|` is
/// discarded and the stream continues, up to eight draws.
pub fn random_instance(n: usize, lo: f64, hi: f64, seed: u64) -> Result<LinearSystem> {
    if n == 0 {
        return Err(Error::InvalidParameter("instance size must be >= 1".into()));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "need finite lo < hi, got [{lo}, {hi})"
        )));
    }
    let mut rng = InstanceRng::new(seed);
    for _ in 0..INSTANCE_ATTEMPTS {
        let a: Vec<f64> = (0..n * n).map(|_| rng.uniform(lo, hi)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.uniform(lo, hi)).collect();
        let a = DenseMatrix::from_row_major(n, n, a)?;
        if LuFactor::new(&a, SINGULAR_PIVOT_TOL).is_ok() {
            return LinearSystem::new(a, Vector::new(b)?);
        }
    }
    Err(Error::SingularInstance {
        attempts: INSTANCE_ATTEMPTS,
    })
}
