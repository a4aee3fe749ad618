//! Property suites for the norm solver, the special functions and the bound
//! shapes, over randomized discrete laws and profiles.

use proptest::prelude::*;

use subexp_core::bounds::{NormFamily, SumProfile};
use subexp_core::dist::Distribution;
use subexp_core::orlicz::{orlicz_norm_value, OrliczFunction};
use subexp_core::special::{lambert_w, LambertBranch};

/// Discrete law with 1–5 atoms on [−4, 4] and normalized positive weights.
fn discrete_law() -> impl Strategy<Value = Distribution> {
    prop::collection::vec(((-4.0f64..4.0), (0.05f64..1.0)), 1..=5).prop_map(|atoms| {
        let total: f64 = atoms.iter().map(|&(_, w)| w).sum();
        let points: Vec<(f64, f64)> = atoms.iter().map(|&(v, w)| (v, w / total)).collect();
        Distribution::discrete(points).expect("normalized atoms are valid")
    })
}

proptest! {
    #[test]
    fn lambert_round_trip_principal(z in -0.36f64..100.0) {
        let w = lambert_w(LambertBranch::Principal, z).unwrap();
        prop_assert!(w >= -1.0);
        prop_assert!((w * w.exp() - z).abs() <= 1e-13 * z.abs().max(1.0));
    }

    #[test]
    fn lambert_round_trip_minus_one(t in 1e-6f64..0.999) {
        // Log-ish cover of (-1/e, 0).
        let z = -t * (-1.0f64).exp();
        let w = lambert_w(LambertBranch::MinusOne, z).unwrap();
        prop_assert!(w <= -1.0);
        prop_assert!((w * w.exp() - z).abs() <= 1e-13 * z.abs());
    }

    #[test]
    fn orlicz_function_order_and_positivity(u in 0.0f64..700.0) {
        let p1 = OrliczFunction::Psi1.eval(u).unwrap();
        let p11 = OrliczFunction::Psi11.eval(u).unwrap();
        prop_assert!(p11 <= p1);
        if u > 0.0 {
            prop_assert!(p11 > 0.0);
        }
    }

    #[test]
    fn pointwise_exponential_inequality(lambda in -1.0f64..=1.0, x in -20.0f64..=20.0) {
        let lhs = (lambda * x).exp_m1() - lambda * x;
        let rhs = lambda * lambda * OrliczFunction::Psi11.eval(x.abs()).unwrap();
        prop_assert!(lhs <= rhs + 1e-12, "λ = {lambda}, x = {x}");
    }

    #[test]
    fn norm_homogeneity(d in discrete_law(), c in prop_oneof![-8.0f64..-0.125, 0.125f64..8.0]) {
        if d.is_almost_surely_zero() {
            return Ok(());
        }
        let scaled = match &d {
            Distribution::Discrete { points } => Distribution::discrete(
                points.iter().map(|&(v, p)| (c * v, p)).collect(),
            ).unwrap(),
            _ => unreachable!(),
        };
        for f in [OrliczFunction::Psi1, OrliczFunction::Psi11] {
            let base = orlicz_norm_value(&d, f, 1.0).unwrap();
            let got = orlicz_norm_value(&scaled, f, 1.0).unwrap();
            let want = c.abs() * base;
            prop_assert!(
                (got - want).abs() <= 1e-8 * want.max(1e-12),
                "{f}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn norm_monotone_in_epsilon_and_function(
        d in discrete_law(),
        e1 in 0.05f64..0.8,
        bump in 0.1f64..4.0,
    ) {
        if d.is_almost_surely_zero() {
            return Ok(());
        }
        let e2 = e1 + bump;
        for f in [OrliczFunction::Psi1, OrliczFunction::Psi11] {
            let n1 = orlicz_norm_value(&d, f, e1).unwrap();
            let n2 = orlicz_norm_value(&d, f, e2).unwrap();
            prop_assert!(n2 <= n1 * (1.0 + 1e-9), "{f}: eps {e1} -> {e2}");
        }
        let p1 = orlicz_norm_value(&d, OrliczFunction::Psi1, e1).unwrap();
        let p11 = orlicz_norm_value(&d, OrliczFunction::Psi11, e1).unwrap();
        prop_assert!(p11 <= p1 * (1.0 + 1e-9));
    }

    #[test]
    fn piecewise_below_minform_and_continuous_at_knee(
        norms in prop::collection::vec(0.05f64..4.0, 1..=6),
        eps in 0.05f64..3.0,
        x in 0.0f64..40.0,
    ) {
        let p = SumProfile::from_norms(&norms, eps, NormFamily::Psi11Based).unwrap();
        prop_assert!(p.log_tail_piecewise(x) <= p.log_tail_minform(x) + 1e-15);
        let knee = p.knee();
        let g = -knee * knee / (4.0 * p.b_squared);
        let l = -(knee / p.m - p.b_squared / (p.m * p.m));
        prop_assert!((g - l).abs() <= 1e-12 * g.abs());
        // Bounds live in (0, 1] and are nonincreasing.
        let b = p.tail_piecewise(x);
        prop_assert!(b > 0.0 && b <= 1.0);
        prop_assert!(p.tail_piecewise(x + 0.5) <= b * (1.0 + 1e-15));
    }
}
