use soler_core::groundstate::{
    closed_form_groundstate_1d, decay_constants, groundstate_residual, hat_pair, lambda_k,
    solve_groundstate, GroundstateOptions,
};
use soler_core::model::grid::quadrature::radial_integral;
use soler_core::model::Grid;
use soler_core::Error;

fn solve(n: usize, k: f64, m: f64, h: f64) -> soler_core::groundstate::GroundstateProfile {
    let grid = Grid::with_step(30.0, h, n).unwrap();
    solve_groundstate(n, k, m, &grid, &GroundstateOptions::default()).unwrap()
}

#[test]
fn one_dimensional_cubic_is_sech() {
    let gs = solve(1, 1.0, 1.0, 0.01);
    assert!((gs.u0 - 1.0).abs() < 1e-10);
    let err = gs
        .grid
        .nodes()
        .iter()
        .zip(&gs.u)
        .filter(|(t, _)| **t <= 20.0)
        .map(|(t, u)| (u - 1.0 / t.cosh()).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-8, "max error {err:e}");
}

#[test]
fn shooting_matches_closed_form_for_other_powers() {
    for (k, m) in [(0.5, 1.0), (2.0, 1.0), (1.0, 0.5)] {
        let gs = solve(1, k, m, 0.01);
        let exact = closed_form_groundstate_1d(k, m, &gs.grid);
        let err =
            gs.u.iter()
                .zip(&exact.u)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
        assert!(err < 1e-8, "k={k} m={m}: {err:e}");
    }
}

// Two resolutions agree to 1e-8, which pins the amplitude below.
#[test]
fn three_dimensional_amplitude_is_pinned() {
    let coarse = solve(3, 1.0, 0.5, 0.01);
    let fine = solve(3, 1.0, 0.5, 0.005);
    assert!((coarse.u0 - fine.u0).abs() < 1e-8);
    assert!((fine.u0 - 4.337_387_68).abs() < 1e-7, "u0 = {}", fine.u0);
}

// With m = 1/2 the equation is the Townes problem, Q(0) = 2.20620086 and |Q|_2^2 = 11.70090.
#[test]
fn two_dimensional_charge_is_townes() {
    let gs = solve(2, 1.0, 0.5, 0.005);
    assert!((gs.u0 - 2.206_200_86).abs() < 1e-7);
    let density: Vec<f64> = gs.u.iter().map(|u| u * u).collect();
    let q = radial_integral(&gs.grid, &density);
    assert!((q - 11.7009).abs() < 5e-4, "charge {q}");
}

#[test]
fn supercritical_exponent_is_rejected() {
    let grid = Grid::with_step(30.0, 0.01, 3).unwrap();
    let err = solve_groundstate(3, 2.0, 1.0, &grid, &GroundstateOptions::default()).unwrap_err();
    assert!(matches!(err, Error::InvalidExponent { n: 3, .. }));
}

// sech(25) is above the default truncation tolerance, so the short domain declares its own.
#[test]
fn amplitude_is_insensitive_to_domain_length() {
    let opts = GroundstateOptions {
        truncation_tol: 1e-10,
        ..GroundstateOptions::default()
    };
    let amplitude = |t_max: f64| {
        let grid = Grid::with_step(t_max, 0.01, 1).unwrap();
        solve_groundstate(1, 1.0, 1.0, &grid, &opts).unwrap().u0
    };
    assert!((amplitude(25.0) - amplitude(35.0)).abs() < 1e-9);
}

#[test]
fn profile_is_positive_and_decreasing() {
    for (n, k) in [(1, 1.0), (2, 1.0), (3, 1.0), (3, 0.5)] {
        let gs = solve(n, k, 1.0, 0.01);
        assert_eq!(gs.du[0], 0.0);
        let floor = 100.0 * f64::EPSILON;
        for i in 0..gs.u.len() - 1 {
            assert!(gs.u[i] > 0.0);
            if gs.u[i] > floor {
                assert!(gs.u[i + 1] < gs.u[i], "n={n} k={k} node {i}");
            }
            assert!(gs.du[i] <= 0.0);
        }
        assert!(gs.u[gs.u.len() - 1] / gs.u0 < 1e-12);
    }
}

#[test]
fn residual_converges_under_refinement() {
    let coarse = groundstate_residual(&solve(3, 1.0, 1.0, 0.02));
    let fine = groundstate_residual(&solve(3, 1.0, 1.0, 0.01));
    assert!(fine < coarse, "{coarse:e} -> {fine:e}");
}

#[test]
fn decay_constants_bracket_the_tail() {
    let (c, big_c) = decay_constants(&solve(1, 1.0, 1.0, 0.01), 5.0, 15.0).unwrap();
    assert!((c - 2.0).abs() < 1e-3 && (big_c - 2.0).abs() < 1e-3);
    let (c, big_c) = decay_constants(&solve(3, 1.0, 1.0, 0.01), 5.0, 15.0).unwrap();
    assert!(c > 0.0 && big_c / c < 3.0);
}

#[test]
fn hat_pair_and_lambda_for_sech() {
    let gs = solve(1, 1.0, 1.0, 0.01);
    let hat = hat_pair(&gs, &gs.grid).unwrap();
    assert_eq!(hat.uhat.values()[0], 0.0);
    for (t, u) in gs.grid.nodes().iter().zip(hat.uhat.values()).step_by(50) {
        assert!((u - 0.5 * t.tanh() / t.cosh()).abs() < 1e-8);
    }
    assert!((lambda_k(&hat) - 1.25).abs() < 1e-4);
}

#[test]
fn plain_residual_is_second_order() {
    let residual = |h: f64| {
        groundstate_residual(&closed_form_groundstate_1d(
            1.0,
            1.0,
            &Grid::with_step(30.0, h, 1).unwrap(),
        ))
    };
    let ratio = residual(0.02) / residual(0.01);
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}
