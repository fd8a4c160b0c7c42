//! Reference computations shared by the integration tests. Nothing here
//! calls into the library's own factorizations.

#![allow(dead_code)]

use qlinsolve::linsys::{DenseMatrix, LinearSystem, Vector};

pub fn two_by_two_system() -> LinearSystem {
    LinearSystem::new(
        DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap(),
        Vector::new(vec![5.0, 6.0]).unwrap(),
    )
    .unwrap()
}

/// Gaussian elimination with partial pivoting, kept in factored form.
pub struct Gepp {
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl Gepp {
    pub fn new(a: &DenseMatrix) -> Self {
        let n = a.rows();
        let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
                .unwrap();
            m.swap(k, p);
            perm.swap(k, p);
            let pivot = m[k][k];
            assert!(pivot != 0.0, "oracle hit an exact zero pivot");
            for i in k + 1..n {
                let f = m[i][k] / pivot;
                m[i][k] = f;
                if f == 0.0 {
                    continue;
                }
                let (top, bottom) = m.split_at_mut(i);
                for (x, &y) in bottom[0][k + 1..].iter_mut().zip(&top[k][k + 1..]) {
                    *x -= f * y;
                }
            }
        }
        Self { lu: m, perm }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i][j] * y[j]).sum();
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[i][j] * y[j]).sum();
            y[i] = (y[i] - s) / self.lu[i][i];
        }
        y
    }
}

pub fn gepp_solve(a: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    Gepp::new(a).solve(b)
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `b − A·x` accumulated with compensated (TwoSum/FMA) arithmetic, rounded
/// once at the end.
pub fn residual_compensated(a: &DenseMatrix, b: &[f64], x: &[f64]) -> Vec<f64> {
    (0..a.rows())
        .map(|i| {
            let (mut s, mut c) = (b[i], 0.0);
            for (&aij, &xj) in a.row(i).iter().zip(x) {
                let p = -aij * xj;
                let e = (-aij).mul_add(xj, -p);
                let (t, q) = two_sum(s, p);
                s = t;
                c += q + e;
            }
            s + c
        })
        .collect()
}

pub fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Direct solution improved by iterative refinement with compensated
/// residuals. Returns the point and its compensated `‖r‖²`.
pub fn refined_solution(sys: &LinearSystem) -> (Vec<f64>, f64) {
    let lu = Gepp::new(sys.a());
    let mut x = lu.solve(sys.b());
    let mut best = (x.clone(), norm_sq(&residual_compensated(sys.a(), sys.b(), &x)));
    for _ in 0..4 {
        let r = residual_compensated(sys.a(), sys.b(), &x);
        let dx = lu.solve(&r);
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
        let f = norm_sq(&residual_compensated(sys.a(), sys.b(), &x));
        if f < best.1 {
            best = (x.clone(), f);
        }
    }
    best
}

/// `H = AᵀA` by the textbook triple loop.
pub fn gram_naive(a: &DenseMatrix) -> Vec<Vec<f64>> {
    let (r, c) = (a.rows(), a.cols());
    (0..c)
        .map(|i| {
            (0..c)
                .map(|j| (0..r).map(|k| a.get(k, i) * a.get(k, j)).sum())
                .collect()
        })
        .collect()
}

/// `u·H·w` with `H` given explicitly.
pub fn h_form(h: &[Vec<f64>], u: &[f64], w: &[f64]) -> f64 {
    h.iter()
        .zip(u)
        .map(|(row, &ui)| ui * row.iter().zip(w).map(|(hij, wj)| hij * wj).sum::<f64>())
        .sum()
}

/// Coefficients `D` with `x − x0 = Σ_j D_j·v_j` for the rows `v_j` of `v`,
/// via `Vᵀ·D = x − x0`.
pub struct Frame(Gepp);

impl Frame {
    pub fn new(v: &DenseMatrix) -> Self {
        Self(Gepp::new(&v.transpose()))
    }

    pub fn coefficients(&self, x0: &[f64], x: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = x.iter().zip(x0).map(|(a, b)| a - b).collect();
        self.0.solve(&d)
    }
}
