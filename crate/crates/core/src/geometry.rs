//! Geometry induced by `H = AᵀA`.
//!
//! `f(x) = ‖A·x − b‖²` only sees `x` through `⟨·,·⟩_H`, so directions that
//! are `H`-orthogonal decouple the residual: with `x − x* = Σ_j D_j·v_j`,
//! `f(x) = Σ_j C_j·D_j²` where `C_j = ⟨v_j, v_j⟩_H`. A fully conjugate basis
//! gives a diagonal QUBO; a block-conjugate one gives independent blocks.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linsys::{
    dot, ensure_len, gram_counted, DenseMatrix, LinearSystem, LuFactor, Vector,
    SINGULAR_PIVOT_TOL,
};

/// Degeneracy threshold for `⟨v_k, v_k⟩_H`, relative to `max |H_ij|`.
pub const GEOMETRY_DEGENERACY_TOL: f64 = 1e-12;

/// Largest dimension [`verify_subrhombus_property`] will enumerate.
pub const MAX_SUBRHOMBUS_DIM: usize = 16;

/// `vᵀ·H·w`.
pub fn h_inner(h: &DenseMatrix, v: &[f64], w: &[f64]) -> Result<f64> {
    ensure_len("H inner product (square H)", h.rows(), h.cols())?;
    ensure_len("H inner product (left)", h.rows(), v.len())?;
    ensure_len("H inner product (right)", h.cols(), w.len())?;
    Ok(v.iter()
        .enumerate()
        .filter(|(_, &vi)| vi != 0.0)
        .map(|(i, &vi)| vi * dot(h.row(i), w))
        .sum())
}

/// Rows `v_k` with `V·H·Vᵀ = diag(c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateBasis {
    v: DenseMatrix,
    c: Vector,
}

impl ConjugateBasis {
    pub fn v(&self) -> &DenseMatrix {
        &self.v
    }

    pub fn c(&self) -> &Vector {
        &self.c
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn into_parts(self) -> (DenseMatrix, Vector) {
        (self.v, self.c)
    }
}

/// Gram-Schmidt in the `H` inner product, starting from the canonical basis.
///
/// `v_k = u_k + Σ_{m<k} β_km·v_m` with `β_km = −⟨v_m, u_k⟩_H / C_m`, then
/// normalised. Because `u_k = e_k`, `⟨v_m, u_k⟩_H` is entry `k` of the
/// cached `O_m = H·v_m`, and `V` comes out lower triangular.
pub fn conjugate_basis(a: &DenseMatrix) -> Result<ConjugateBasis> {
    conjugate_basis_counted(a, &mut 0)
}

/// [`conjugate_basis`] that also adds its scalar multiply-adds to `ops`.
pub fn conjugate_basis_counted(a: &DenseMatrix, ops: &mut u64) -> Result<ConjugateBasis> {
    ensure_len("conjugate basis (square A)", a.rows(), a.cols())?;
    let n = a.rows();
    let h = gram_counted(a, ops);
    let tol = GEOMETRY_DEGENERACY_TOL * h.max_abs();

    let mut v = vec![0.0; n * n];
    let mut o = vec![0.0; n * n];
    let mut c = vec![0.0; n];
    for k in 0..n {
        let (done, rest) = v.split_at_mut(k * n);
        let vk = &mut rest[..n];
        vk[k] = 1.0;
        for m in 0..k {
            let beta = -o[m * n + k] / c[m];
            let vm = &done[m * n..m * n + m + 1];
            for (x, &y) in vk[..=m].iter_mut().zip(vm) {
                *x += beta * y;
            }
            *ops += m as u64 + 1;
        }
        let norm = dot(&vk[..=k], &vk[..=k]).sqrt();
        for x in &mut vk[..=k] {
            *x /= norm;
        }
        let ok = &mut o[k * n..(k + 1) * n];
        for (i, oi) in ok.iter_mut().enumerate() {
            *oi = dot(&h.row(i)[..=k], &vk[..=k]);
        }
        *ops += (n * (k + 1)) as u64;
        let ck = dot(&vk[..=k], &ok[..=k]);
        if !(ck > tol) {
            return Err(Error::SingularGeometry { index: k, norm: ck });
        }
        c[k] = ck;
    }
    Ok(ConjugateBasis {
        v: DenseMatrix::from_row_major_unchecked(n, n, v),
        c: Vector::from_vec_unchecked(c),
    })
}

/// Ordered block sizes `(a₁, …, a_m)`, each ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition(Vec<usize>);

impl Composition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidComposition(format!(
                "block sizes must be positive, got {sizes:?}"
            )));
        }
        Ok(Self(sizes))
    }

    /// `⌈n/k⌉` blocks of `k`, the last one possibly smaller.
    pub fn uniform(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidComposition(format!(
                "uniform blocks need n >= 1 and k >= 1 (n={n}, k={k})"
            )));
        }
        let mut sizes = vec![k; n / k];
        if n % k != 0 {
            sizes.push(n % k);
        }
        Ok(Self(sizes))
    }

    pub fn singletons(n: usize) -> Result<Self> {
        Self::uniform(n, 1)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn max_block(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Start offset of every block.
    pub fn offsets(&self) -> Vec<usize> {
        self.0
            .iter()
            .scan(0, |acc, &s| {
                let start = *acc;
                *acc += s;
                Some(start)
            })
            .collect()
    }

    pub fn check_total(&self, n: usize) -> Result<()> {
        if self.total() == n {
            Ok(())
        } else {
            Err(Error::InvalidComposition(format!(
                "block sizes sum to {}, system has dimension {n}",
                self.total()
            )))
        }
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Parses `"4,4,2"`. The `uniform:K` form needs the dimension; see
/// [`Composition::parse_for`].
impl FromStr for Composition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sizes = s
            .split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|_| {
                    Error::InvalidComposition(format!("bad block size `{}`", t.trim()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sizes)
    }
}

impl Composition {
    /// Accepts `uniform:K` or an explicit list, checked against `n`.
    pub fn parse_for(s: &str, n: usize) -> Result<Self> {
        let comp = match s.strip_prefix("uniform:") {
            Some(k) => {
                let k = k.trim().parse::<usize>().map_err(|_| {
                    Error::InvalidComposition(format!("bad uniform block size `{k}`"))
                })?;
                Self::uniform(n, k)?
            }
            None => s.parse()?,
        };
        comp.check_total(n)?;
        Ok(comp)
    }
}

/// Rows `v_k` with `V·H·Vᵀ` block diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockBasis {
    v: DenseMatrix,
    composition: Composition,
    blocks: Vec<DenseMatrix>,
}

impl BlockBasis {
    pub fn v(&self) -> &DenseMatrix {
        &self.v
    }

    pub fn composition(&self) -> &Composition {
        &self.composition
    }

    /// Diagonal blocks `H_{a_k}` of `V·H·Vᵀ`.
    pub fn blocks(&self) -> &[DenseMatrix] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.v.rows()
    }
}

/// Block conjugation: for each block but the last, every later direction
/// `r` is replaced by `u_r − Σ_{i∈block} (H_block⁻¹·H[block, r])_i·u_i`
/// (normalised) and `H` is transformed by the resulting `V*`. The product
/// `V = V*_{m−1}···V*_1` is returned with unit rows, and the blocks are
/// read off the final `V·H·Vᵀ`.
///
/// With all blocks of size one this is the full conjugate basis, and that
/// recurrence (`O(N³)` instead of one dense congruence per block) is used
/// directly, so the result coincides with [`conjugate_basis`].
pub fn block_conjugate_basis(a: &DenseMatrix, composition: &Composition) -> Result<BlockBasis> {
    ensure_len("block basis (square A)", a.rows(), a.cols())?;
    let n = a.rows();
    composition.check_total(n)?;
    if composition.max_block() == 1 {
        let basis = conjugate_basis(a).map_err(|e| match e {
            Error::SingularGeometry { index, .. } => Error::DecompositionFailure { block: index },
            other => other,
        })?;
        let blocks = basis
            .c()
            .iter()
            .map(|&c| DenseMatrix::diagonal(&[c]))
            .collect::<Result<_>>()?;
        let (v, _) = basis.into_parts();
        return Ok(BlockBasis {
            v,
            composition: composition.clone(),
            blocks,
        });
    }
    block_sweep(a, composition)
}

fn block_sweep(a: &DenseMatrix, composition: &Composition) -> Result<BlockBasis> {
    let n = a.rows();
    let h0 = gram_counted(a, &mut 0);
    let mut h = h0.clone();
    let mut v = DenseMatrix::identity(n);
    let offsets = composition.offsets();
    let sizes = composition.sizes();

    for (k, (&start, &size)) in offsets.iter().zip(sizes).enumerate() {
        let hb = h.sub_block(start, size);
        let lu = LuFactor::new(&hb, SINGULAR_PIVOT_TOL)
            .map_err(|_| Error::DecompositionFailure { block: k })?;
        let end = start + size;
        if end == n {
            break;
        }
        let mut step = DenseMatrix::identity(n);
        for r in end..n {
            let col: Vec<f64> = (start..end).map(|i| h[(i, r)]).collect();
            let beta = lu.solve(&col)?;
            let row = step.row_mut(r);
            for (i, &bi) in beta.iter().enumerate() {
                row[start + i] = -bi;
            }
            let norm = dot(row, row).sqrt();
            for x in row.iter_mut() {
                *x /= norm;
            }
        }
        h = step.congruence(&h)?;
        v = step.matmul(&v)?;
    }

    for i in 0..n {
        let row = v.row_mut(i);
        let norm = dot(row, row).sqrt();
        for x in row.iter_mut() {
            *x /= norm;
        }
    }
    let full = v.congruence(&h0)?;
    let blocks = offsets
        .iter()
        .zip(sizes)
        .map(|(&s, &len)| full.sub_block(s, len))
        .collect();
    Ok(BlockBasis {
        v,
        composition: composition.clone(),
        blocks,
    })
}

/// Coordinates in a row basis `V`: pre-factors `Vᵀ` once so repeated
/// [`RhombusFrame::coefficients`] calls are `O(N²)`.
#[derive(Debug, Clone)]
pub struct RhombusFrame {
    lu: LuFactor,
}

impl RhombusFrame {
    pub fn new(v: &DenseMatrix) -> Result<Self> {
        ensure_len("rhombus frame (square V)", v.rows(), v.cols())?;
        Ok(Self {
            lu: LuFactor::new(v, SINGULAR_PIVOT_TOL)?,
        })
    }

    /// `D` with `x = x0 + Σ_j D_j·v_j`.
    pub fn coefficients(&self, x0: &[f64], x: &[f64]) -> Result<Vector> {
        ensure_len("rhombus coefficients (x0)", self.lu.dim(), x0.len())?;
        ensure_len("rhombus coefficients (x)", self.lu.dim(), x.len())?;
        let d: Vec<f64> = x.iter().zip(x0).map(|(a, b)| a - b).collect();
        self.lu.solve_transpose(&d)
    }
}

/// Solves `Vᵀ·D = x − x0`.
pub fn rhombus_coefficients(v: &DenseMatrix, x0: &[f64], x: &[f64]) -> Result<Vector> {
    RhombusFrame::new(v)?.coefficients(x0, x)
}

/// Checks the sub-rhombus property on one rhombus of edge `l` around `x0`.
///
/// The exact solution `x*` must lie in the rhombus (`|D_j| ≤ l/2`),
/// otherwise [`Error::OutsideRhombus`] is returned. The 2ᴺ candidate
/// corners are `y = x0 + Σ_j s_j·(l/4)·v_j`, with bit `j` of the corner
/// index set meaning `s_j = +1`. The corner of least `f` (lowest index on
/// ties) is selected and the result says whether `x*` lies in the
/// sub-rhombus of edge `l/2` centred there.
pub fn verify_subrhombus_property(sys: &LinearSystem, x0: &[f64], l: f64) -> Result<bool> {
    let n = sys.dim();
    ensure_len("sub-rhombus check (x0)", n, x0.len())?;
    if n > MAX_SUBRHOMBUS_DIM {
        return Err(Error::ProblemTooLarge {
            dim: n,
            max: MAX_SUBRHOMBUS_DIM,
        });
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidParameter(format!("edge length must be > 0, got {l}")));
    }
    let basis = conjugate_basis(sys.a())?;
    let x_star = LuFactor::new(sys.a(), SINGULAR_PIVOT_TOL)?.solve(sys.b())?;
    let d = rhombus_coefficients(basis.v(), x0, &x_star)?;
    let slack = 1e-9 * l;
    for (j, &dj) in d.iter().enumerate() {
        if dj.abs() > l / 2.0 + slack {
            return Err(Error::OutsideRhombus {
                index: j,
                coefficient: dj,
                bound: l / 2.0,
            });
        }
        let e = dj.abs() - l / 4.0;
        debug_assert!(e.abs() <= l / 4.0 + slack, "|E_{j}| = {} > l/4", e.abs());
    }

    // f(y) = ‖r0 + Σ_j s_j·(l/4)·A·v_j‖² with r0 = A·x0 − b.
    let av: Vec<Vec<f64>> = (0..n)
        .map(|j| sys.a().mul_vec_raw(basis.v().row(j)))
        .collect();
    let r0: Vec<f64> = sys.residual_raw(x0).iter().map(|r| -r).collect();
    let quarter = l / 4.0;
    let mut best = (f64::INFINITY, 0usize);
    let mut r = vec![0.0; n];
    for corner in 0..1usize << n {
        r.copy_from_slice(&r0);
        for (j, avj) in av.iter().enumerate() {
            let s = if corner >> j & 1 == 1 { quarter } else { -quarter };
            for (ri, &a) in r.iter_mut().zip(avj) {
                *ri += s * a;
            }
        }
        let f = dot(&r, &r);
        if f < best.0 {
            best = (f, corner);
        }
    }

    let corner = best.1;
    Ok(d.iter().enumerate().all(|(j, &dj)| {
        let s = if corner >> j & 1 == 1 { quarter } else { -quarter };
        (dj - s).abs() <= quarter + slack
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsys::{random_instance, InstanceRng};

    fn two_by_two_a() -> DenseMatrix {
        DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap()
    }

    fn max_off_diag(m: &DenseMatrix) -> f64 {
        let n = m.rows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(m[(i, j)].abs());
                }
            }
        }
        worst
    }

    #[test]
    fn h_inner_examples() {
        let h = DenseMatrix::from_rows(&[vec![10.0, 14.0], vec![14.0, 20.0]]).unwrap();
        assert_eq!(h_inner(&h, &[1.0, 0.0], &[-1.4, 1.0]).unwrap(), 0.0);
        assert_eq!(h_inner(&h, &[1.0, 0.0], &[1.0, 0.0]).unwrap(), 10.0);
        let id = DenseMatrix::identity(3);
        assert_eq!(h_inner(&id, &[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap(), 32.0);
        assert!(h_inner(&h, &[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn trivial_bases() {
        let b = conjugate_basis(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(b.v(), &DenseMatrix::identity(4));
        assert_eq!(b.c().as_slice(), &[1.0; 4]);
        let b = conjugate_basis(&DenseMatrix::diagonal(&[2.0, 3.0]).unwrap()).unwrap();
        assert_eq!(b.v(), &DenseMatrix::identity(2));
        assert_eq!(b.c().as_slice(), &[4.0, 9.0]);
    }

    #[test]
    fn two_by_two_basis() {
        let b = conjugate_basis(&two_by_two_a()).unwrap();
        let norm = (1.4f64 * 1.4 + 1.0).sqrt();
        assert_eq!(b.v().row(0), &[1.0, 0.0]);
        assert!((b.v()[(1, 0)] + 1.4 / norm).abs() < 1e-15);
        assert!((b.v()[(1, 1)] - 1.0 / norm).abs() < 1e-15);
        let h = crate::linsys::gram_matrix(&two_by_two_a()).unwrap();
        let d = b.v().congruence(&h).unwrap();
        assert!(max_off_diag(&d) < 1e-12);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(
            conjugate_basis(&a),
            Err(Error::SingularGeometry { index: 1, .. })
        ));
    }

    #[test]
    fn operation_count_is_cubic() {
        for n in [5, 20, 60] {
            let sys = random_instance(n, 0.0, 200.0, n as u64).unwrap();
            let mut ops = 0;
            conjugate_basis_counted(sys.a(), &mut ops).unwrap();
            let n3 = (n * n * n) as u64;
            assert!(ops <= 10 * n3, "n={n}: {ops} ops");
            assert!(ops >= n3 / 2, "n={n}: {ops} ops");
        }
    }

    #[test]
    fn composition_parsing() {
        assert_eq!(Composition::parse_for("uniform:4", 10).unwrap().sizes(), &[4, 4, 2]);
        assert_eq!(Composition::parse_for("3, 2", 5).unwrap().sizes(), &[3, 2]);
        assert!(Composition::parse_for("3,2", 6).is_err());
        assert!(Composition::parse_for("3,0,3", 6).is_err());
        assert!(Composition::parse_for("uniform:x", 6).is_err());
        assert_eq!(Composition::new(vec![2, 3]).unwrap().offsets(), vec![0, 2]);
        assert_eq!(Composition::new(vec![2, 3]).unwrap().to_string(), "2,3");
    }

    #[test]
    fn single_block_is_identity() {
        let sys = random_instance(5, 0.0, 200.0, 3).unwrap();
        let bb = block_conjugate_basis(sys.a(), &Composition::new(vec![5]).unwrap()).unwrap();
        assert_eq!(bb.v(), &DenseMatrix::identity(5));
        assert_eq!(bb.blocks()[0], crate::linsys::gram_matrix(sys.a()).unwrap());
    }

    #[test]
    fn singleton_blocks_match_full_basis() {
        let sys = random_instance(8, 0.0, 200.0, 11).unwrap();
        let full = conjugate_basis(sys.a()).unwrap();
        let singletons = Composition::singletons(8).unwrap();
        let swept = block_sweep(sys.a(), &singletons).unwrap();
        for (k, blk) in swept.blocks().iter().enumerate() {
            let rel = (blk[(0, 0)] - full.c()[k]).abs() / full.c()[k];
            assert!(rel < 1e-10, "block {k}: rel {rel}");
        }
        let dv = swept
            .v()
            .as_slice()
            .iter()
            .zip(full.v().as_slice())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(dv < 1e-12, "max |ΔV| = {dv:e}");
        let direct = block_conjugate_basis(sys.a(), &singletons).unwrap();
        assert_eq!(direct.v(), full.v());
    }

    #[test]
    fn degenerate_singleton_is_named() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        let err = block_conjugate_basis(&a, &Composition::singletons(2).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DecompositionFailure { block: 1 }), "{err}");
    }

    #[test]
    fn degenerate_block_is_named() {
        // Second block is the zero column pair of a singular matrix.
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 1.0, 2.0],
        ])
        .unwrap();
        let err = block_conjugate_basis(&a, &Composition::new(vec![2, 1]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DecompositionFailure { block: 1 }), "{err}");
    }

    #[test]
    fn coefficients_reconstruct() {
        let b = conjugate_basis(&two_by_two_a()).unwrap();
        let mut rng = InstanceRng::new(4);
        for _ in 0..20 {
            let x0 = [rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)];
            let x = [rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)];
            let d = rhombus_coefficients(b.v(), &x0, &x).unwrap();
            for i in 0..2 {
                let back = x0[i] + d[0] * b.v()[(0, i)] + d[1] * b.v()[(1, i)];
                assert!((back - x[i]).abs() <= 1e-9 * (1.0 + x[i].abs()));
            }
        }
        let d = rhombus_coefficients(&DenseMatrix::identity(2), &[0.0, 0.0], &[3.0, -2.0]).unwrap();
        assert_eq!(d.as_slice(), &[3.0, -2.0]);
        let d = rhombus_coefficients(b.v(), &[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!(d.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn subrhombus_on_small_examples() {
        let sys = LinearSystem::new(two_by_two_a(), Vector::new(vec![5.0, 6.0]).unwrap()).unwrap();
        assert!(verify_subrhombus_property(&sys, &[0.0, 0.0], 20.0).unwrap());
        assert!(matches!(
            verify_subrhombus_property(&sys, &[0.0, 0.0], 1.0),
            Err(Error::OutsideRhombus { .. })
        ));
        let id = LinearSystem::new(DenseMatrix::identity(2), Vector::new(vec![0.7, 0.2]).unwrap())
            .unwrap();
        assert!(verify_subrhombus_property(&id, &[0.0, 0.0], 2.0).unwrap());
    }
}
