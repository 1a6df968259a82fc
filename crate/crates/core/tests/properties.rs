use proptest::prelude::*;

use soler_core::model::inequalities::power_difference;
use soler_core::model::{norm_x, Grid, GridFunction, Nonlinearity, Parity, PowerTerm};

fn grid() -> Grid {
    Grid::new(10.0, 41, 2).unwrap()
}

fn function(values: Vec<f64>) -> GridFunction {
    GridFunction::new(grid(), values, Parity::Even).unwrap()
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 41)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn norm_is_homogeneous(v in values(), c in -10.0..10.0f64) {
        let g = function(v);
        let lhs = norm_x(&g.scaled(c));
        let rhs = c.abs() * norm_x(&g);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn norm_satisfies_triangle_inequality(a in values(), b in values()) {
        let (fa, fb) = (function(a), function(b));
        let sum = fa.zip_with(&fb, |x, y| x + y).unwrap();
        prop_assert!(norm_x(&sum) <= norm_x(&fa) + norm_x(&fb) + 1e-12);
    }

    #[test]
    fn antiderivative_matches_f(tau in 0.1..10.0f64, k in 0.2..3.0f64, c in -1.0..1.0f64, dk in 0.1..2.0f64) {
        let nl = Nonlinearity::new(k, vec![PowerTerm { coefficient: c, exponent: k + dk }]).unwrap();
        let d = 1e-4 * tau;
        let fd = (nl.eval_F(tau + d) - nl.eval_F(tau - d)) / (2.0 * d);
        prop_assert!((fd - nl.eval_f(tau)).abs() <= 1e-6 * (1.0 + nl.eval_f(tau).abs()));
    }

    #[test]
    fn power_difference_bound(a in -50.0..50.0f64, b in -50.0..50.0f64, k in prop::sample::select(vec![0.3, 0.5, 1.0, 2.0, 3.0])) {
        let (lhs, rhs) = power_difference(a, b, k);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
    }
}
