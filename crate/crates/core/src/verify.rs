//! Acceptance criteria A1 to A13, grouped into suites shared by the CLI and the test harness.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    boundary_inflow_check, cone_region_check, decay_fit, dphi_domega_scaling, error_scaling_fit,
    inner_product_crosscheck, positivity_report, vk_classify, InflowSetup, Sign,
};
use crate::dirac::{
    continue_branch, solve_profile, solve_profile_shooting, ShootingOptions, SolverOptions,
};
use crate::error::{Error, Result};
use crate::groundstate::{hat_pair, solve_groundstate, GroundstateProfile};
use crate::model::grid::{Grid, GridFunction, Parity};
use crate::model::inequalities::{power_difference, power_taylor_remainder};
use crate::model::nonlinearity::{Nonlinearity, PowerTerm};
use crate::model::norms::{norm_x, norm_x1_weighted};
use crate::model::profile::{Branch, HatPair};
use crate::operators::{assemble_l_minus, assemble_l_plus, scaling_generator};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: String,
    pub name: String,
    pub pass: bool,
    pub measurements: Vec<Measurement>,
    pub detail: String,
}

impl CriterionResult {
    fn new(id: &str, name: &str) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            pass: true,
            measurements: Vec::new(),
            detail: String::new(),
        }
    }

    fn measure(&mut self, name: impl Into<String>, value: f64) {
        self.measurements.push(Measurement {
            name: name.into(),
            value,
        });
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.pass = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(&what.into());
        }
    }

    fn failed(id: &str, name: &str, err: Error) -> Self {
        let mut r = Self::new(id, name);
        r.require(false, format!("error: {err}"));
        r
    }

    /// `PASS A1 name | key=value ...`
    pub fn summary_line(&self) -> String {
        let values: Vec<String> = self
            .measurements
            .iter()
            .map(|m| format!("{}={:.6e}", m.name, m.value))
            .collect();
        let mut line = format!(
            "{} {} {} | {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            values.join(" ")
        );
        if !self.detail.is_empty() {
            line.push_str(&format!(" | {}", self.detail));
        }
        line
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Groundstate,
    Dirac,
    Asymptotics,
    Charge,
    Properties,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = [
        "groundstate",
        "dirac",
        "asymptotics",
        "charge",
        "properties",
        "all",
    ];

    pub fn criteria(self) -> Vec<&'static str> {
        match self {
            Suite::Groundstate => vec!["A1", "A2", "A3"],
            Suite::Dirac => vec!["A4", "A5", "A6"],
            Suite::Asymptotics => vec!["A7", "A10", "A11"],
            Suite::Charge => vec!["A8", "A9", "A12"],
            Suite::Properties => vec!["A13"],
            Suite::All => vec![
                "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10", "A11", "A12", "A13",
            ],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "groundstate" => Ok(Suite::Groundstate),
            "dirac" => Ok(Suite::Dirac),
            "asymptotics" => Ok(Suite::Asymptotics),
            "charge" => Ok(Suite::Charge),
            "properties" => Ok(Suite::Properties),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidParameter(format!(
                "unknown suite '{other}'; valid suites: {}",
                Suite::NAMES.join(", ")
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::Groundstate => "groundstate",
            Suite::Dirac => "dirac",
            Suite::Asymptotics => "asymptotics",
            Suite::Charge => "charge",
            Suite::Properties => "properties",
            Suite::All => "all",
        };
        f.write_str(name)
    }
}

pub fn run_suite(suite: Suite) -> Vec<CriterionResult> {
    suite
        .criteria()
        .into_iter()
        .map(|id| run_criterion(id).expect("listed criterion"))
        .collect()
}

pub fn run_criterion(id: &str) -> Result<CriterionResult> {
    let run: fn() -> Result<CriterionResult> = match id {
        "A1" => a1,
        "A2" => a2,
        "A3" => a3,
        "A4" => a4,
        "A5" => a5,
        "A6" => a6,
        "A7" => a7,
        "A8" => a8,
        "A9" => a9,
        "A10" => a10,
        "A11" => a11,
        "A12" => a12,
        "A13" => a13,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown criterion {other}"
            )))
        }
    };
    Ok(run().unwrap_or_else(|e| CriterionResult::failed(id, name_of(id), e)))
}

fn name_of(id: &str) -> &'static str {
    match id {
        "A1" => "groundstate matches sech",
        "A2" => "l_minus kernel",
        "A3" => "l_plus scaling identity",
        "A4" => "fixed point agrees with shooting",
        "A5" => "correction size scaling",
        "A6" => "positivity along branches",
        "A7" => "exponential decay envelope",
        "A8" => "charge derivative signs",
        "A9" => "leading-order charge",
        "A10" => "omega-derivative norm scaling",
        "A11" => "cone trapping and boundary inflow",
        "A12" => "q1/q2 inner product",
        "A13" => "randomized core properties",
        _ => "unknown",
    }
}

const T_MAX: f64 = 30.0;
const STEP: f64 = 0.01;
const GAMMA: f64 = 0.1;

fn grid(n: usize, step: f64) -> Result<Grid> {
    Grid::with_step(T_MAX, step, n)
}

fn groundstate(n: usize, k: f64, step: f64) -> Result<GroundstateProfile> {
    solve_groundstate(n, k, 1.0, &grid(n, step)?, &Default::default())
}

fn hat(n: usize, k: f64) -> Result<HatPair> {
    let gs = groundstate(n, k, STEP)?;
    hat_pair(&gs, &gs.grid)
}

fn branch(n: usize, nl: &Nonlinearity, eps: &[f64]) -> Result<Branch> {
    let h = hat(n, nl.k())?;
    continue_branch(eps, &h, nl, &SolverOptions::default(), GAMMA)
}

fn geometric(hi: f64, lo: f64, steps: usize) -> Vec<f64> {
    let ratio = (lo / hi).powf(1.0 / (steps - 1) as f64);
    (0..steps).map(|i| hi * ratio.powi(i as i32)).collect()
}

fn complete(b: &Branch, r: &mut CriterionResult, label: &str) {
    if let Some((eps, why)) = &b.failure {
        r.require(
            false,
            format!("{label}: branch stopped at eps = {eps}: {why}"),
        );
    }
}

fn a1() -> Result<CriterionResult> {
    let mut r = CriterionResult::new("A1", name_of("A1"));
    let start = Instant::now();
    let gs = groundstate(1, 1.0, STEP)?;
    let elapsed = start.elapsed().as_secs_f64();
    let err = gs
        .grid
        .nodes()
        .iter()
        .zip(&gs.u)
        .filter(|(t, _)| **t <= 20.0)
        .map(|(t, u)| (u - 1.0 / t.cosh()).abs())
        .fold(0.0, f64::max);
    r.measure("max_error", err);
    r.measure("seconds", elapsed);
    r.require(err < 1e-8, format!("max error {err:e} >= 1e-8"));
    r.require(elapsed < 1.0, format!("runtime {elapsed:.3} s >= 1 s"));
    Ok(r)
}

/// Rows whose stencil reaches past `t_max` see the zero extension instead of the tail.
const BOUNDARY_ROWS: usize = 3;

fn l_minus_residual(gs: &GroundstateProfile) -> Result<f64> {
    let res = assemble_l_minus(gs).apply_scalar(&gs.u)?;
    Ok(res
        .iter()
        .take(res.len() - BOUNDARY_ROWS)
        .fold(0.0f64, |m, v| m.max(v.abs())))
}

fn a2() -> Result<CriterionResult> {
    let mut r = CriterionResult::new("A2", name_of("A2"));
    let coarse = l_minus_residual(&groundstate(1, 1.0, STEP)?)?;
    let fine = l_minus_residual(&groundstate(1, 1.0, STEP / 2.0)?)?;
    let ratio = coarse / fine;
    r.measure("residual_h", coarse);
    r.measure("residual_h_half", fine);
    r.measure("ratio", ratio);
    r.require(coarse < 1e-6, format!("residual {coarse:e} >= 1e-6"));
    r.require(
        (3.5..=4.5).contains(&ratio),
        format!("halving ratio {ratio:.2} outside [3.5, 4.5]"),
    );
    Ok(r)
}

fn a3() -> Result<CriterionResult> {
    let mut r = CriterionResult::new("A3", name_of("A3"));
    for n in [1usize, 3] {
        let gs = groundstate(n, 1.0, STEP)?;
        let (w, _) = scaling_generator(&gs)?;
        let res = assemble_l_plus(&gs).apply_scalar(w.values())?;
        let worst = res
            .iter()
            .zip(&gs.u)
            .take(res.len() - BOUNDARY_ROWS)
            .map(|(a, u)| (a + u / gs.m).abs())
            .fold(0.0, f64::max);
        r.measure(format!("residual_n{n}"), worst);
        r.require(worst < 1e-5, format!("n = {n}: residual {worst:e} >= 1e-5"));
    }
    Ok(r)
}

fn a4() -> Result<CriterionResult> {
    let mut r = CriterionResult::new("A4", name_of("A4"));
    let nl = Nonlinearity::pure_power(1.0)?;
    for (n, tol) in [(1usize, 1e-6), (3, 1e-4)] {
        let h = hat(n, 1.0)?;
        for eps in [0.05, 0.025] {
            let start = Instant::now();
            let fp = solve_profile(eps, &h, &nl, &SolverOptions::default())?;
            let sh = solve_profile_shooting(eps, &h, &nl, &ShootingOptions::default())?;
            let seconds = start.elapsed().as_secs_f64();
            let diff =
                fp.v.values()
                    .iter()
                    .zip(sh.v.values())
                    .zip(fp.u.values().iter().zip(sh.u.values()))
                    .map(|((a, b), (c, d))| (a - b).abs() + (c - d).abs())
                    .fold(0.0, f64::max);
            r.measure(format!("diff_n{n}_eps{eps}"), diff);
            r.measure(format!("seconds_n{n}_eps{eps}"), seconds);
            r.require(
                diff < tol,
                format!("n = {n}, eps = {eps}: difference {diff:e} >= {tol:e}"),
            );
            r.require(
                seconds < 10.0,
                format!("n = {n}, eps = {eps}: {seconds:.1} s"),
            );
        }
    }
    Ok(r)
}

const A5_EPS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

/// Label, branch and the admissible slope interval.
type LabeledBranch = (&'static str, Branch, (f64, f64));

fn a5_branches() -> Result<Vec<LabeledBranch>> {
    let pure = Nonlinearity::pure_power(1.0)?;
    let perturbed = Nonlinearity::new(
        1.0,
        vec![PowerTerm {
            coefficient: 0.5,
            exponent: 1.5,
        }],
    )?;
    Ok(vec![
        ("pure", branch(1, &pure, &A5_EPS)?, (1.8, 2.2)),
        ("perturbed", branch(1, &perturbed, &A5_EPS)?, (0.8, 1.2)),
    ])
}

fn a5() -> Result<CriterionResult> {
    let mut r = CriterionResult::new("A5", name_of("A5"));
    for (label, b, (lo, hi)) in a5_branches()? {
        complete(&b, &mut r, label);
        let slope = error_scaling_fit(&b, GAMMA)?;
        r.measure(format!("slope_{label}"), slope);
        r.require(
            (lo..=hi).contains(&slope),
            format!("{label}: slope {slope:.3} outside [{lo}, {hi}]"),
        );
    }
    Ok(r)
}

fn a6() -> Result<CriterionResult> {
    let mut r = CriterionResult::new("A6", name_of("A6"));
    let mut violations = 0usize;
    let mut checked = 0usize;
    for (label, b, _) in a5_branches()? {
        complete(&b, &mut r, label);
        for p in b.profiles.iter().filter(|p| p.eps <= 0.05) {
            let rep = positivity_report(p);
            checked += 1;
            r.measure(
                format!("{label}_eps{}_min_ratio_uv", p.eps),
                rep.min_ratio_uv,
            );
            r.measure(
                format!("{label}_eps{}_min_scalar_ratio", p.eps),
                rep.min_scalar_ratio,
            );
            if !rep.pass {
                violations += 1;
            }
        }
    }
    r.measure("violations", violations as f64);
    r.require(checked > 0, "no branch points with eps <= 0.05");
    r.require(
        violations == 0,
        format!("{violations} profiles violate positivity"),
    );
    Ok(r)
}

fn a7() -> Result<CriterionResult> {
    let mut r = CriterionResult::new("A7", name_of("A7"));
    let nl = Nonlinearity::pure_power(1.0)?;
    for n in [1usize, 2, 3] {
        let p = solve_profile(0.025, &hat(n, 1.0)?, &nl, &SolverOptions::default())?;
        let fit = decay_fit(&p.v, (5.0, 15.0))?;
        let spread = fit.ratio_max / fit.ratio_min;
        r.measure(format!("spread_n{n}"), spread);
        r.measure(format!("rate_n{n}"), fit.rate_estimate);
        r.require(spread < 3.0, format!("n = {n}: max/min {spread:.3} >= 3"));
    }
    Ok(r)
}

const VK_EPS_HI: f64 = 0.05;
const VK_EPS_LO: f64 = 0.01;
const VK_STEPS: usize = 8;

fn a8() -> Result<CriterionResult> {
    let mut r = CriterionResult::new("A8", name_of("A8"));
    let cases = [
        (1usize, 1.0, Sign::Negative),
        (1, 2.0, Sign::Negative),
        (1, 3.0, Sign::Positive),
        (2, 0.5, Sign::Negative),
        (2, 2.0, Sign::Positive),
    ];
    let eps = geometric(VK_EPS_HI, VK_EPS_LO, VK_STEPS);
    for (n, k, want) in cases {
        let nl = Nonlinearity::pure_power(k)?;
        let label = format!("n{n}_k{k}");
        let b = branch(n, &nl, &eps)?;
        complete(&b, &mut r, &label);
        let v = vk_classify(&nl, &b)?;
        let code = match v.measured_sign {
            Sign::Negative => -1.0,
            Sign::Positive => 1.0,
            Sign::Indeterminate => 0.0,
        };
        r.measure(format!("sign_{label}"), code);
        r.require(
            v.measured_sign == want,
            format!("{label}: measured {:?}, want {want:?}", v.measured_sign),
        );
        if let Some(slope) = v.slope {
            r.measure(format!("slope_{label}"), slope);
            r.require(
                (slope - 1.0).abs() <= 0.2,
                format!("{label}: |dQ/deps| slope {slope:.3} not 1 +- 0.2"),
            );
        }
    }
    Ok(r)
}

fn a9() -> Result<CriterionResult> {
    let mut r = CriterionResult::new("A9", name_of("A9"));
    let nl = Nonlinearity::pure_power(1.0)?;
    let p = solve_profile(0.05, &hat(1, 1.0)?, &nl, &SolverOptions::default())?;
    let ratio = crate::analysis::charge(&p) / (2.0 * 0.05);
    r.measure("q_over_2eps", ratio);
    r.require(
        (ratio - 1.0).abs() < 0.05,
        format!("Q/(2 eps) = {ratio:.4}"),
    );
    Ok(r)
}

fn a10() -> Result<CriterionResult> {
    let mut r = CriterionResult::new("A10", name_of("A10"));
    let eps = geometric(0.1, 0.0125, 6);
    for k in [1.0, 2.0] {
        let nl = Nonlinearity::pure_power(k)?;
        let b = branch(1, &nl, &eps)?;
        let label = format!("k{k}");
        complete(&b, &mut r, &label);
        let fit = dphi_domega_scaling(&b)?;
        let target = -1.0 + 2.0 / k;
        r.measure(format!("slope_{label}"), fit.slope);
        r.measure(format!("target_{label}"), target);
        r.require(
            (fit.slope - target).abs() <= 0.15,
            format!("{label}: slope {:.3} not {target} +- 0.15", fit.slope),
        );
    }
    Ok(r)
}

fn a11() -> Result<CriterionResult> {
    let mut r = CriterionResult::new("A11", name_of("A11"));
    let nl = Nonlinearity::pure_power(1.0)?;
    let mut outside = 0usize;
    for n in [1usize, 2, 3] {
        let b = branch(n, &nl, &[0.05, 0.025, 0.0125])?;
        complete(&b, &mut r, &format!("n{n}"));
        let t1 = (2.0 * n as f64).max(5.0);
        for p in &b.profiles {
            if !cone_region_check(p, t1)? {
                outside += 1;
                r.require(false, format!("n = {n}, eps = {}: outside the cone", p.eps));
            }
        }
    }
    r.measure("cone_failures", outside as f64);
    let h = hat(1, 1.0)?;
    let delta = 0.01 * h.vhat.values()[0];
    let setup = InflowSetup {
        eps: 0.05,
        nl: &nl,
        hat: &h,
        delta,
        nu: delta / 10.0,
        t: 5.0,
        sample_count: 100,
    };
    let inflow = boundary_inflow_check(&setup)?;
    for piece in &inflow.pieces {
        r.measure(format!("min_dot[{}]", piece.name), piece.min_dot());
    }
    r.require(inflow.pass, "velocity leaves a boundary piece");
    Ok(r)
}

fn a12() -> Result<CriterionResult> {
    let mut r = CriterionResult::new("A12", name_of("A12"));
    let nl = Nonlinearity::pure_power(2.0)?;
    let b = branch(1, &nl, &geometric(0.1, 0.01, 8))?;
    complete(&b, &mut r, "n1_k2");
    let checks = inner_product_crosscheck(&b)?;
    let tail = &checks[checks.len().saturating_sub(3)..];
    for c in tail {
        r.measure(format!("deviation_eps{:.5}", c.eps), c.relative_deviation);
    }
    r.require(tail.len() == 3, "fewer than three interior points");
    let monotone = tail
        .windows(2)
        .all(|w| w[1].relative_deviation < w[0].relative_deviation);
    r.require(monotone, "deviation does not decrease with eps");
    Ok(r)
}

const A13_CASES: usize = 10_000;
const A13_SEED: u64 = 0x5EED_1A13;

fn a13() -> Result<CriterionResult> {
    let mut r = CriterionResult::new("A13", name_of("A13"));
    let mut rng = ChaCha8Rng::seed_from_u64(A13_SEED);
    let holds = |(lhs, rhs): (f64, f64)| lhs <= rhs * (1.0 + 1e-12) + 1e-300;
    let exponents = [0.3, 0.5, 1.0, 2.0, 3.0];
    let (mut first, mut second) = (0usize, 0usize);
    for _ in 0..A13_CASES {
        let a = rng.gen_range(-50.0..50.0);
        let b = rng.gen_range(-50.0..50.0);
        let k = exponents[rng.gen_range(0..exponents.len())];
        first += usize::from(!holds(power_difference(a, b, k)));
        second += usize::from(!holds(power_taylor_remainder(a, b, k)));
    }

    // Norm axioms on random even grid functions.
    let g = Grid::new(10.0, 201, 1)?;
    let random = |rng: &mut ChaCha8Rng| {
        let values = (0..g.n_points())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        GridFunction::new(g, values, Parity::Even)
    };
    let mut axioms = 0usize;
    for _ in 0..A13_CASES / 10 {
        let (x, y) = (random(&mut rng)?, random(&mut rng)?);
        let c = rng.gen_range(-5.0..5.0);
        let sum = x.zip_with(&y, |a, b| a + b)?;
        let tri = norm_x(&sum) <= (norm_x(&x) + norm_x(&y)) * (1.0 + 1e-12);
        let hom = (norm_x(&x.scaled(c)) - c.abs() * norm_x(&x)).abs()
            <= 1e-12 * norm_x(&x) * (1.0 + c.abs());
        let wsum = norm_x1_weighted(&sum, GAMMA)?;
        let wtri =
            wsum <= (norm_x1_weighted(&x, GAMMA)? + norm_x1_weighted(&y, GAMMA)?) * (1.0 + 1e-12);
        axioms += usize::from(!(tri && hom && wtri && norm_x(&x) > 0.0));
    }

    // F' = f by centered differences.
    let mut antiderivative = 0usize;
    for _ in 0..A13_CASES {
        let k = rng.gen_range(0.2..3.0);
        let nl = Nonlinearity::new(
            k,
            vec![PowerTerm {
                coefficient: rng.gen_range(-1.0..1.0),
                exponent: k + rng.gen_range(0.1..2.0),
            }],
        )?;
        let tau: f64 = rng.gen_range(0.05..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let h = 1e-5 * tau.abs();
        let fd = (nl.eval_F(tau + h) - nl.eval_F(tau - h)) / (2.0 * h);
        let f = nl.eval_f(tau);
        antiderivative += usize::from((fd - f).abs() > 1e-6 * (1.0 + f.abs()));
    }

    r.measure("first_inequality_violations", first as f64);
    r.measure("second_inequality_violations", second as f64);
    r.measure("norm_axiom_violations", axioms as f64);
    r.measure("antiderivative_violations", antiderivative as f64);
    r.require(
        first == 0,
        format!("{first} violations of the first power inequality"),
    );
    r.require(
        second == 0,
        format!("{second} violations of the second power inequality"),
    );
    r.require(axioms == 0, format!("{axioms} norm axiom violations"));
    r.require(
        antiderivative == 0,
        format!("{antiderivative} cases with F' != f"),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse_and_cover_everything() {
        for name in Suite::NAMES {
            let s: Suite = name.parse().unwrap();
            assert_eq!(s.to_string(), name);
        }
        assert!("nope".parse::<Suite>().is_err());
        let mut ids: Vec<&str> = [
            Suite::Groundstate,
            Suite::Dirac,
            Suite::Asymptotics,
            Suite::Charge,
            Suite::Properties,
        ]
        .iter()
        .flat_map(|s| s.criteria())
        .collect();
        ids.sort_by_key(|id| id[1..].parse::<u32>().unwrap());
        assert_eq!(ids, Suite::All.criteria());
        assert!(run_criterion("A99").is_err());
    }

    #[test]
    fn summary_line_format() {
        let mut r = CriterionResult::new("A0", "demo");
        r.measure("x", 1.5);
        r.require(false, "broken");
        assert_eq!(r.summary_line(), "FAIL A0 demo | x=1.500000e0 | broken");
    }
}
