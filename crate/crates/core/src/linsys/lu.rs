//! LU factorisation with partial pivoting.

use super::matrix::{ensure_len, DenseMatrix, Vector};
use crate::error::{Error, Result};

/// `P·A = L·U` with unit-lower `L` and upper `U` packed into one matrix.
#[derive(Debug, Clone)]
pub struct LuFactor {
    n: usize,
    packed: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactor {
    /// Factors `a`, failing when a pivot drops below `rel_tol · max|a|`.
    pub fn new(a: &DenseMatrix, rel_tol: f64) -> Result<Self> {
        ensure_len("LU factorisation (square)", a.rows(), a.cols())?;
        let n = a.rows();
        let mut m = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = rel_tol * a.max_abs();

        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, m[i * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= threshold || pivot == 0.0 {
                return Err(Error::Singular { step: k, pivot });
            }
            if p != k {
                for j in 0..n {
                    m.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let d = m[k * n + k];
            for i in (k + 1)..n {
                let factor = m[i * n + k] / d;
                m[i * n + k] = factor;
                if factor == 0.0 {
                    continue;
                }
                for j in (k + 1)..n {
                    m[i * n + j] -= factor * m[k * n + j];
                }
            }
        }
        Ok(Self { n, packed: m, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vector> {
        ensure_len("LU solve", self.n, b.len())?;
        let n = self.n;
        let m = &self.packed;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| m[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|j| m[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / m[i * n + i];
        }
        Vector::new(x)
    }

    /// Solves `Aᵀ·x = b` with the same factors.
    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vector> {
        ensure_len("LU transpose solve", self.n, b.len())?;
        let n = self.n;
        let m = &self.packed;
        // Uᵀ z = b, then Lᵀ w = z, then x = Pᵀ w.
        let mut z = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| m[j * n + i] * z[j]).sum();
            z[i] = (z[i] - s) / m[i * n + i];
        }
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|j| m[j * n + i] * z[j]).sum();
            z[i] -= s;
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k];
        }
        Vector::new(x)
    }
}
