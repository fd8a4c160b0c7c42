//! Square-lattice QUBO encoding of `A·x = b`.
//!
//! Each coordinate gets `R` bits with weights `2⁰, 2⁻¹, …, 2¹⁻ᴿ`, giving
//! `x̂_i ∈ [0, 2 − 2¹⁻ᴿ]`, and the lattice point is `x = x0 + L·(x̂ − 1)`.
//! Substituting into the residual gives `f(x) = L²·‖A_q·q − b_q‖²` with
//! `A_q = A ⊗ (2⁰, …, 2¹⁻ᴿ)` and `b_q = (b + L·A·1 − A·x0)/L`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linsys::{dot, ensure_len, gram_counted, DenseMatrix, LinearSystem, Vector};

/// Bit weights `2⁰, 2⁻¹, …, 2¹⁻ᴿ`, most significant first.
pub fn bit_weights(r: usize) -> Vec<f64> {
    (0..r).map(|s| 0.5f64.powi(s as i32)).collect()
}

/// Binary vector ordered coordinate-major: `q_1⁽⁰⁾ … q_1⁽ᴿ⁻¹⁾, q_2⁽⁰⁾, …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryAssignment {
    bits: Vec<u8>,
}

impl BinaryAssignment {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(i) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidParameter(format!(
                "bit {i} has value {}, expected 0 or 1",
                bits[i]
            )));
        }
        Ok(Self { bits })
    }

    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![0; n] }
    }

    pub fn ones(n: usize) -> Self {
        Self { bits: vec![1; n] }
    }

    pub(crate) fn from_bits_unchecked(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }

    pub(crate) fn as_reals(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| f64::from(b)).collect()
    }
}

impl fmt::Display for BinaryAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Search cube around `x0`: edge scale `l`, `r` bits per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBox {
    x0: Vector,
    l: f64,
    r: usize,
}

impl SearchBox {
    pub fn new(x0: Vector, l: f64, r: usize) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "edge length must be positive, got {l}"
            )));
        }
        if r == 0 {
            return Err(Error::InvalidParameter("bit depth must be >= 1".into()));
        }
        Ok(Self { x0, l, r })
    }

    pub fn x0(&self) -> &Vector {
        &self.x0
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }
}

/// Returns `x̂` with `x̂_i = Σ_s q_i⁽ˢ⁾·2⁻ˢ`.
pub fn bits_to_xhat(q: &BinaryAssignment, n: usize, r: usize) -> Result<Vector> {
    ensure_len("bits to x-hat", n * r, q.len())?;
    let w = bit_weights(r);
    let xhat = q
        .bits()
        .chunks(r.max(1))
        .take(n)
        .map(|chunk| chunk.iter().zip(&w).map(|(&b, &wt)| f64::from(b) * wt).sum())
        .collect();
    Ok(Vector::from_vec_unchecked(xhat))
}

/// Lattice point `x = x0 + L·(x̂ − 1)`.
pub fn box_decode(bx: &SearchBox, q: &BinaryAssignment) -> Result<Vector> {
    let xhat = bits_to_xhat(q, bx.dim(), bx.r())?;
    Ok(Vector::from_vec_unchecked(
        bx.x0()
            .iter()
            .zip(xhat.iter())
            .map(|(x0, xh)| x0 + bx.l() * (xh - 1.0))
            .collect(),
    ))
}

/// A QUBO `min qᵀQq` with the linear part folded onto the diagonal.
///
/// `offset` is the constant dropped from the expansion, so that for
/// encoded systems `energy(q) + offset = ‖A_q·q − b_q‖²`. Subproblems built
/// directly from a matrix carry `offset = 0` and no `A_q`/`b_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    q: DenseMatrix,
    offset: f64,
    a_q: Option<DenseMatrix>,
    b_q: Option<Vector>,
}

impl QuboProblem {
    pub fn from_matrix(q: DenseMatrix) -> Result<Self> {
        ensure_len("QUBO matrix (square)", q.rows(), q.cols())?;
        let tol = 1e-12 * q.max_abs();
        if q.asymmetry() > tol {
            return Err(Error::InvalidParameter(format!(
                "QUBO matrix is not symmetric (max |Q_ij - Q_ji| = {:e})",
                q.asymmetry()
            )));
        }
        Ok(Self {
            q,
            offset: 0.0,
            a_q: None,
            b_q: None,
        })
    }

    /// Builds `Q = A_qᵀA_q − 2·Diag(A_qᵀ·b_q)` and `offset = b_q·b_q`.
    pub fn from_least_squares(a_q: DenseMatrix, b_q: Vector) -> Result<Self> {
        ensure_len("QUBO least-squares rows", a_q.rows(), b_q.len())?;
        let mut q = gram_counted(&a_q, &mut 0);
        let linear = a_q.tr_mul_vec_raw(&b_q);
        for (i, l) in linear.iter().enumerate() {
            q[(i, i)] -= 2.0 * l;
        }
        let offset = b_q.norm_sq();
        Ok(Self {
            q,
            offset,
            a_q: Some(a_q),
            b_q: Some(b_q),
        })
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    pub fn q_matrix(&self) -> &DenseMatrix {
        &self.q
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn a_q(&self) -> Option<&DenseMatrix> {
        self.a_q.as_ref()
    }

    pub fn b_q(&self) -> Option<&Vector> {
        self.b_q.as_ref()
    }

    /// `qᵀQq`.
    pub fn energy(&self, q: &BinaryAssignment) -> Result<f64> {
        ensure_len("QUBO energy", self.dim(), q.len())?;
        Ok(self.energy_of_bits(q.bits()))
    }

    pub(crate) fn energy_of_bits(&self, bits: &[u8]) -> f64 {
        let ones: Vec<usize> = (0..bits.len()).filter(|&i| bits[i] == 1).collect();
        ones.iter()
            .map(|&i| {
                let row = self.q.row(i);
                ones.iter().map(|&j| row[j]).sum::<f64>()
            })
            .sum()
    }
}

/// Free-function form of [`QuboProblem::energy`].
pub fn energy(p: &QuboProblem, q: &BinaryAssignment) -> Result<f64> {
    p.energy(q)
}

/// `A ⊗ w` for a row `w` of bit weights: column `j·R + s` is `A[:, j]·w_s`.
pub(crate) fn kron_weights(a: &DenseMatrix, w: &[f64]) -> DenseMatrix {
    let r = w.len();
    let mut out = DenseMatrix::zeros(a.rows(), a.cols() * r);
    for i in 0..a.rows() {
        let src = a.row(i);
        let dst = out.row_mut(i);
        for (j, &aij) in src.iter().enumerate() {
            for (s, &ws) in w.iter().enumerate() {
                dst[j * r + s] = aij * ws;
            }
        }
    }
    out
}

/// Encodes the system over the square lattice of `bx`.
pub fn encode_square(sys: &LinearSystem, bx: &SearchBox) -> Result<QuboProblem> {
    ensure_len("square encoding", sys.dim(), bx.dim())?;
    let a = sys.a();
    let l = bx.l();
    let a_q = kron_weights(a, &bit_weights(bx.r()));
    let ones = vec![1.0; sys.dim()];
    let a_ones = a.mul_vec_raw(&ones);
    let a_x0 = a.mul_vec_raw(bx.x0());
    let b_q: Vec<f64> = (0..sys.dim())
        .map(|i| (sys.b()[i] + l * a_ones[i] - a_x0[i]) / l)
        .collect();
    QuboProblem::from_least_squares(a_q, Vector::new(b_q)?)
}

/// `‖A_q·q − b_q‖²` for problems that retain their least-squares form.
pub fn least_squares_value(p: &QuboProblem, q: &BinaryAssignment) -> Option<f64> {
    let (a_q, b_q) = (p.a_q()?, p.b_q()?);
    let qr = q.as_reals();
    Some(
        (0..a_q.rows())
            .map(|i| {
                let r = dot(a_q.row(i), &qr) - b_q[i];
                r * r
            })
            .sum(),
    )
}
