mod common;

use std::sync::OnceLock;

use bicons::extrinsic::{glue_profiles, mu0, CaseParams};
use bicons::intrinsic::IntrinsicParams;
use bicons::models::{from_half_space, isometry_residual, to_half_space, HalfSpacePoint, MinkowskiVec, TangentVec};
use bicons::numerics::{fd_derivative, MonotoneTable, Poly, Side};
use proptest::prelude::*;

fn intrinsic(i: usize) -> &'static IntrinsicParams {
    static P: OnceLock<Vec<IntrinsicParams>> = OnceLock::new();
    &P.get_or_init(|| [-1.0, 0.0, 1.0].iter().map(|&c| IntrinsicParams::new(c).unwrap()).collect())[i]
}

fn hyperboloid_point(u: f64, v: f64, w: f64) -> bicons::models::HyperboloidPoint {
    from_half_space(&HalfSpacePoint::new(u, v, w).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn half_space_roundtrip(u in -5.0..5.0f64, v in -5.0..5.0f64, lw in -3.0..3.0f64) {
        let w = lw.exp();
        let x = hyperboloid_point(u, v, w);
        prop_assert!(x.constraint_residual() < 1e-12 * (1.0 + x.vec().max_abs().powi(2)));
        let p = to_half_space(&x).unwrap();
        prop_assert!((p.u - u).abs() < 1e-12 * (1.0 + u.abs()));
        prop_assert!((p.v - v).abs() < 1e-12 * (1.0 + v.abs()));
        prop_assert!((p.w - w).abs() < 1e-12 * w);
    }

    #[test]
    fn model_map_is_isometric(
        u in -2.0..2.0f64, v in -2.0..2.0f64, lw in -1.0..1.0f64,
        a in prop::array::uniform4(-1.0..1.0f64), b in prop::array::uniform4(-1.0..1.0f64),
    ) {
        let x = hyperboloid_point(u, v, lw.exp());
        let t1 = TangentVec::project(x, MinkowskiVec(a));
        let t2 = TangentVec::project(x, MinkowskiVec(b));
        let scale = 1.0 + t1.dir.max_abs() * t2.dir.max_abs();
        prop_assert!(isometry_residual(&x, &t1, &t2) < 1e-8 * scale);
    }

    #[test]
    fn tangent_projection_is_tangent(u in -3.0..3.0f64, lw in -2.0..2.0f64, a in prop::array::uniform4(-2.0..2.0f64)) {
        let x = hyperboloid_point(u, 0.5, lw.exp());
        let t = TangentVec::project(x, MinkowskiVec(a));
        prop_assert!(TangentVec::new(x, t.dir).is_ok());
    }

    #[test]
    fn gamma_even_and_above_boundary_value(fam in 0usize..3, w in 0.0..10.0f64) {
        let ip = intrinsic(fam);
        let g = ip.Gamma(w).unwrap();
        prop_assert_eq!(g, ip.Gamma(-w).unwrap());
        prop_assert!(g >= 1.0 / ip.xi01 - 1e-12);
        prop_assert_eq!(ip.gamma_prime(w).unwrap(), -ip.gamma_prime(-w).unwrap());
    }

    #[test]
    fn rho_decreases_in_xi(fam in 0usize..3, a in 0.001..1.0f64, b in 0.001..1.0f64) {
        prop_assume!((a - b).abs() > 1e-9);
        let ip = intrinsic(fam);
        let (lo, hi) = (a.min(b) * ip.xi01, a.max(b) * ip.xi01);
        prop_assert!(ip.rho(lo).unwrap() > ip.rho(hi).unwrap());
    }

    #[test]
    fn xi_omega_roundtrip(fam in 0usize..3, w in 0.0..30.0f64) {
        let ip = intrinsic(fam);
        let xi = ip.xi_of_omega(w).unwrap();
        prop_assert!((ip.omega(xi).unwrap() - w).abs() < 1e-11 * (1.0 + w));
    }

    // the frozen-table inverse against bisection on the forward map,
    // which samples ω as densely as the bisection needs
    #[test]
    fn table_inverse_matches_bisection(fam in 0usize..3, w in 0.0..8.0f64) {
        let ip = intrinsic(fam);
        let want = common::bisect(|x| ip.omega(x).unwrap() - w, 1e-14, ip.xi01);
        let got = ip.xi_of_omega(w).unwrap();
        prop_assert!((got - want).abs() < 1e-12 * ip.xi01, "{} vs {}", got, want);
    }

    #[test]
    fn monotone_table_inverts(n in 8usize..200, x in 0.0..1.0f64) {
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x * x + x).collect();
        let t = MonotoneTable::new(xs, ys).unwrap();
        let y = t.eval(x);
        // PCHIP of a smooth monotone function stays monotone and close
        prop_assert!((y - (x * x * x + x)).abs() < 5.0 / (n * n) as f64);
        prop_assert!((t.inverse(y).unwrap() - x).abs() < 1e-9);
    }

    #[test]
    fn central_stencil_exact_on_cubics(c in prop::array::uniform4(-3.0..3.0f64), x in -2.0..2.0f64) {
        let p = Poly::new(c.to_vec());
        let d1 = fd_derivative(|t| p.eval(t), x, 1, 1e-2, Side::Symmetric).unwrap();
        let d2 = fd_derivative(|t| p.eval(t), x, 2, 1e-2, Side::Symmetric).unwrap();
        let dp = p.derivative();
        prop_assert!((d1 - dp.eval(x)).abs() < 1e-9);
        prop_assert!((d2 - dp.derivative().eval(x)).abs() < 1e-6);
    }

    #[test]
    fn deflation_divides_exactly(r in -2.0..2.0f64, c in prop::array::uniform3(-3.0..3.0f64)) {
        // (t − r)(c0 + c1 t + c2 t²)
        let p = Poly::new(vec![-r * c[0], c[0] - r * c[1], c[1] - r * c[2], c[2]]);
        let (q, rem) = p.deflate(r);
        prop_assert!(rem.abs() < 1e-12 * (1.0 + p.eval(r.abs() + 1.0).abs()));
        for t in [-1.0, 0.3, 1.7] {
            prop_assert!((q.eval(t) - (c[0] + c[1] * t + c[2] * t * t)).abs() < 1e-12 * 50.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn first_integral_positive_below_root(c in -4.0..4.0f64, frac in 0.001..0.999f64) {
        let p = CaseParams::new(c).unwrap();
        let k = frac * p.kappa01;
        prop_assert!(common::p_reduced(k, c) > 0.0);
        prop_assert!(common::p_reduced(p.kappa01, c).abs() < 1e-12);
        if c > 0.0 {
            prop_assert!(p.kappa01 > (3.0 * c).powi(2) / 4096.0);
        }
    }

    #[test]
    fn mu_strictly_increasing(c in -3.0..3.0f64, a in 0.01..0.99f64, b in 0.01..0.99f64) {
        prop_assume!((a - b).abs() > 1e-6);
        let p = CaseParams::new(c).unwrap();
        let (lo, hi) = (a.min(b) * p.kappa01, a.max(b) * p.kappa01);
        let (mlo, mhi) = (mu0(lo, &p).unwrap(), mu0(hi, &p).unwrap());
        prop_assert!(mlo < mhi);
        prop_assert!(p.mu0m1 < mlo && mhi < p.mu01);
    }

    #[test]
    fn glued_profiles_are_smooth_simple_and_above_axis(c in -3.0..3.0f64) {
        let p = CaseParams::new(c).unwrap();
        let g = glue_profiles(&p, 64).unwrap();
        prop_assert!(g.derivative_match.passes(), "{:?}", g.derivative_match);
        prop_assert!(g.is_simple());
        prop_assert!(g.min_y() > 0.0);
        prop_assert!(g.closure_gap < 1e-9);
    }
}
