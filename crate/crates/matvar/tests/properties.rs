//! Invariances that hold for every input.

use matvar::densities::{CompoundThm1, Density, MatricvariateT, MatrixNormal};
use matvar::hypergeom::{hyperg_eigen, HypergeomSpec};
use matvar::matrixops::{EllipticalParams, SpdMatrix};
use matvar::partitions::enumerate_partitions;
use matvar::zonal::{zonal_eval, zonal_eval_matrix};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize, scale: f64) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-scale..scale, rows * cols).prop_map(move |v| DMatrix::from_row_slice(rows, cols, &v))
}

fn orthogonal(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    matrix(n, n, 1.0).prop_filter("full rank", |a| a.determinant().abs() > 1e-3).prop_map(|a| a.qr().q())
}

fn spd(n: usize) -> impl Strategy<Value = SpdMatrix> {
    matrix(n, n, 1.0).prop_map(move |a| SpdMatrix::new(&a * a.transpose() + DMatrix::identity(n, n) * 0.5).unwrap())
}

fn params(n: usize, m: usize) -> impl Strategy<Value = EllipticalParams> {
    (matrix(n, m, 2.0), spd(m), spd(n)).prop_map(|(mu, s, t)| EllipticalParams::new(mu, s, t).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zonal_depends_only_on_eigenvalues(eig in prop::collection::vec(0.1f64..2.0, 3), q in orthogonal(3), k in 1u32..6) {
        let y = &q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(eig.clone())) * q.transpose();
        for kappa in enumerate_partitions(k, 3) {
            let want = zonal_eval(&kappa, &eig).unwrap();
            prop_assert!(rel(zonal_eval_matrix(&kappa, &y).unwrap(), want) < 1e-10, "{kappa}");
        }
    }

    #[test]
    fn zonal_is_homogeneous(eig in prop::collection::vec(-1.5f64..1.5, 1..4), c in 0.2f64..3.0, k in 1u32..7) {
        let scaled: Vec<f64> = eig.iter().map(|y| c * y).collect();
        for kappa in enumerate_partitions(k, eig.len()) {
            let base = zonal_eval(&kappa, &eig).unwrap();
            let got = zonal_eval(&kappa, &scaled).unwrap();
            prop_assert!((got - c.powi(k as i32) * base).abs() <= 1e-11 * c.powi(k as i32) * (1.0 + base.abs()));
        }
    }

    #[test]
    fn hypergeometric_is_symmetric_in_eigenvalues(eig in prop::collection::vec(-0.8f64..0.8, 3), a in 0.5f64..3.0, b in 1.0f64..4.0) {
        let spec = HypergeomSpec::new(vec![a], vec![b]);
        let mut rev = eig.clone();
        rev.reverse();
        let x = hyperg_eigen(&spec, &eig).unwrap().value;
        prop_assert!(rel(hyperg_eigen(&spec, &rev).unwrap().value, x) < 1e-12);
    }

    #[test]
    fn zero_f_zero_is_exp_trace(eig in prop::collection::vec(-2.0f64..2.0, 1..4)) {
        let v = hyperg_eigen(&HypergeomSpec::new(vec![], vec![]), &eig).unwrap().value;
        prop_assert!(rel(v, eig.iter().sum::<f64>().exp()) < 1e-10);
    }

    #[test]
    fn quad_form_is_orthogonally_invariant(x in matrix(3, 2, 2.0), q in orthogonal(3), r in orthogonal(2)) {
        let p = EllipticalParams::standard(3, 2);
        let mut a = p.quad_form_eigenvalues(&x).unwrap();
        let mut b = p.quad_form_eigenvalues(&(&q * &x * r.transpose())).unwrap();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() < 1e-10 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn elliptical_densities_are_centrally_symmetric(p in params(2, 2), v in matrix(2, 2, 1.5), nu in 1.0f64..8.0) {
        let plus = &p.mu + &v;
        let minus = &p.mu - &v;
        let normal = MatrixNormal::new(p.clone());
        let t = MatricvariateT::new(nu, p.clone()).unwrap();
        let spec = HypergeomSpec::new(vec![], vec![]);
        let c = CompoundThm1::new(nu / 2.0 + 0.6, SpdMatrix::identity(2), DMatrix::zeros(2, 2), spec, p).unwrap();
        let dens: [&dyn Density; 3] = [&normal, &t, &c];
        for d in dens {
            let (l, r) = (d.ln_pdf(&plus).unwrap(), d.ln_pdf(&minus).unwrap());
            prop_assert!((l - r).abs() < 1e-12 * (1.0 + l.abs()));
        }
    }

    #[test]
    fn spd_inverse_and_sqrt_agree(a in spd(3)) {
        let inv = a.inverse();
        prop_assert!((a.matrix() * inv.matrix() - DMatrix::identity(3, 3)).norm() < 1e-10);
        let r = a.sqrt();
        prop_assert!((&r * &r - a.matrix()).norm() < 1e-10 * a.matrix().norm());
        prop_assert!((inv.ln_det() + a.ln_det()).abs() < 1e-12);
    }
}
