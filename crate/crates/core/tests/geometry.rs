mod common;

use proptest::prelude::*;
use qlinsolve::drivers::{suggest_l_from_reference, suggest_l_with_basis};
use qlinsolve::geometry::{
    block_conjugate_basis, conjugate_basis, rhombus_coefficients, verify_subrhombus_property,
    Composition,
};
use qlinsolve::linsys::{random_instance, DenseMatrix};
use qlinsolve::Error;

fn vhvt(a: &DenseMatrix, v: &DenseMatrix) -> Vec<Vec<f64>> {
    let h = common::gram_naive(a);
    let n = v.rows();
    (0..n)
        .map(|i| (0..n).map(|j| common::h_form(&h, v.row(i), v.row(j))).collect())
        .collect()
}

fn composition_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..5, 1..6)
}

#[test]
fn uniform_composition_covers_n_with_short_tail() {
    let c = Composition::parse_for("uniform:4", 10).unwrap();
    assert_eq!(c.sizes(), &[4, 4, 2]);
    assert_eq!(c.to_string(), "4,4,2");
    assert!(Composition::parse_for("3,3", 7).is_err());
    assert!(Composition::parse_for("uniform:0", 7).is_err());
    assert!(Composition::parse_for("2,x", 4).is_err());
}

#[test]
fn outside_rhombus_is_an_error_not_false() {
    let sys = common::two_by_two_system();
    // x* = (−4, 4.5) is far outside a region of edge 1 around the origin.
    let err = verify_subrhombus_property(&sys, &[0.0, 0.0], 1.0).unwrap_err();
    assert!(matches!(err, Error::OutsideRhombus { .. }), "{err}");
}

#[test]
fn reference_based_l_is_tighter_than_the_residual_bound() {
    for seed in 0..20 {
        let sys = random_instance(10, 0.0, 200.0, 600 + seed).unwrap();
        let basis = conjugate_basis(sys.a()).unwrap();
        let x0 = vec![0.0; 10];
        let x_star = common::gepp_solve(sys.a(), sys.b());
        let tight = suggest_l_from_reference(basis.v(), &x0, &x_star).unwrap();
        let safe = suggest_l_with_basis(&sys, &basis, &x0).unwrap();
        assert!(tight <= safe * (1.0 + 1e-12));
        let d = common::Frame::new(basis.v()).coefficients(&x0, &x_star);
        assert!(d.iter().all(|dj| dj.abs() <= tight / 2.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugate_rows_are_unit_and_h_orthogonal(n in 1usize..15, seed in 0u64..100_000) {
        let a = random_instance(n, -10.0, 10.0, seed).unwrap().a().clone();
        let basis = conjugate_basis(&a).unwrap();
        let g = vhvt(&a, basis.v());
        let diag = (0..n).map(|i| g[i][i].abs()).fold(0.0, f64::max);
        for i in 0..n {
            let norm: f64 = basis.v().row(i).iter().map(|x| x * x).sum();
            prop_assert!((norm.sqrt() - 1.0).abs() <= 1e-12);
            prop_assert!((g[i][i] - basis.c()[i]).abs() <= 1e-9 * diag);
            for j in 0..n {
                if i != j {
                    prop_assert!(g[i][j].abs() <= 1e-8 * diag, "({i},{j}) = {}", g[i][j]);
                }
            }
        }
    }

    #[test]
    fn block_basis_is_block_diagonal(sizes in composition_strategy(), seed in 0u64..100_000) {
        let comp = Composition::new(sizes).unwrap();
        let n = comp.total();
        let a = random_instance(n, -10.0, 10.0, seed).unwrap().a().clone();
        let basis = block_conjugate_basis(&a, &comp).unwrap();
        let g = vhvt(&a, basis.v());
        let diag = (0..n).map(|i| g[i][i].abs()).fold(0.0, f64::max);
        let block_of: Vec<usize> = comp
            .sizes()
            .iter()
            .enumerate()
            .flat_map(|(k, &s)| std::iter::repeat_n(k, s))
            .collect();
        for i in 0..n {
            let norm: f64 = basis.v().row(i).iter().map(|x| x * x).sum();
            prop_assert!((norm.sqrt() - 1.0).abs() <= 1e-12);
            for j in 0..n {
                if block_of[i] != block_of[j] {
                    prop_assert!(g[i][j].abs() <= 1e-8 * diag, "({i},{j}) = {}", g[i][j]);
                }
            }
        }
        for (k, (blk, &start)) in basis.blocks().iter().zip(&comp.offsets()).enumerate() {
            for r in 0..blk.rows() {
                for c in 0..blk.cols() {
                    let expect = g[start + r][start + c];
                    prop_assert!((blk[(r, c)] - expect).abs() <= 1e-9 * diag, "block {k}");
                }
            }
        }
    }

    #[test]
    fn coefficients_reconstruct_the_offset(n in 1usize..10, seed in 0u64..100_000) {
        let sys = random_instance(n, -10.0, 10.0, seed).unwrap();
        let basis = conjugate_basis(sys.a()).unwrap();
        let x0: Vec<f64> = sys.b().iter().map(|b| b / 3.0).collect();
        let x: Vec<f64> = sys.b().iter().map(|b| -b).collect();
        let d = rhombus_coefficients(basis.v(), &x0, &x).unwrap();
        for i in 0..n {
            let rebuilt: f64 = x0[i] + (0..n).map(|j| d[j] * basis.v()[(j, i)]).sum::<f64>();
            prop_assert!((rebuilt - x[i]).abs() <= 1e-9 * (1.0 + x[i].abs()));
        }
    }

    #[test]
    fn subrhombus_property_holds_inside(n in 1usize..5, seed in 0u64..100_000, slack in 1.0f64..3.0) {
        let sys = random_instance(n, -10.0, 10.0, seed).unwrap();
        let x0 = vec![0.5; n];
        let basis = conjugate_basis(sys.a()).unwrap();
        let x_star = common::gepp_solve(sys.a(), sys.b());
        let d = common::Frame::new(basis.v()).coefficients(&x0, &x_star);
        let dmax = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        prop_assume!(dmax > 0.0);
        // Make the region slightly larger than strictly needed so rounding in
        // the library's own reference cannot push |D_j| past L/2.
        let l = 2.0 * dmax * slack * (1.0 + 1e-9);
        prop_assert!(verify_subrhombus_property(&sys, &x0, l).unwrap());
    }

    #[test]
    fn composition_text_round_trip(sizes in composition_strategy()) {
        let comp = Composition::new(sizes.clone()).unwrap();
        let back: Composition = comp.to_string().parse().unwrap();
        prop_assert_eq!(back.sizes(), sizes.as_slice());
        prop_assert_eq!(comp.offsets().len(), sizes.len());
    }
}
