//! Solitary-wave profiles in rescaled variables: Picard iteration on `A(eps) W = G(eps, W)`,
//! direct shooting on `V(0)`, and continuation along decreasing `eps`.
//!
//! The rescaled system is
//! `U' + (n-1)U/t + V/(m+w) = g V`, `V' + (m+w) U = eps^2 g U` with `g = f(eps^{2/k} s)/eps^2`,
//! `s = V^2 - eps^2 U^2`.

use crate::analysis::{charge, energy, EnergyOptions};
use crate::error::{Error, Result};
use crate::model::grid::{Grid, GridFunction, Parity};
use crate::model::nonlinearity::Nonlinearity;
use crate::model::norms::{norm_x1_weighted_pair, norm_x_pair};
use crate::model::profile::{check_eps, omega_of, Branch, BranchPoint, DiracProfile, HatPair};
use crate::ode::{advance, match_inward_tail, radial_tail};
use crate::operators::{assemble_a, FactorizedOperator, OperatorKind};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Stopping threshold for the `X` norm of successive differences.
    pub tolerance: f64,
    /// Relaxation in `(0, 1]`; 1 is plain Picard.
    pub damping: f64,
    pub warm_start: Option<(GridFunction, GridFunction)>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            tolerance: 1e-12,
            damping: 1.0,
            warm_start: None,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance = {} must be positive",
                self.tolerance
            )));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping = {} must lie in (0, 1]",
                self.damping
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    /// Bracket for `V(0)`; `None` means `[vhat(0)/2, 2 vhat(0)]`.
    pub v0_bracket: Option<(f64, f64)>,
    /// Relative bracket width at which bisection stops.
    pub bisection_tol: f64,
    /// `|V| + |U|` above this counts as blow-up.
    pub blowup_threshold: f64,
    /// The outward trajectory is kept until `V < tail_switch * V(0)`.
    pub tail_switch: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            v0_bracket: None,
            bisection_tol: 1e-15,
            blowup_threshold: 1e6,
            tail_switch: 1e-3,
        }
    }
}

impl ShootingOptions {
    pub fn validate(&self) -> Result<()> {
        if let Some((lo, hi)) = self.v0_bracket {
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "V(0) bracket ({lo}, {hi}) is not ordered"
                )));
            }
        }
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !(positive(self.bisection_tol) && positive(self.blowup_threshold)) {
            return Err(Error::InvalidParameter(
                "shooting tolerances must be positive".into(),
            ));
        }
        if !(self.tail_switch > 0.0 && self.tail_switch < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail_switch = {} must lie in (0, 1)",
                self.tail_switch
            )));
        }
        Ok(())
    }
}

/// Lorentz scalar in rescaled variables.
fn scalar(eps: f64, v: f64, u: f64) -> f64 {
    v * v - eps * eps * u * u
}

/// Right-hand side `(G_1, G_2)` of the fixed-point equation.
///
/// For `k < 1` the scalar must stay positive wherever the field is nonzero.
pub fn eval_g(
    eps: f64,
    hat: &HatPair,
    tilde_v: &GridFunction,
    tilde_u: &GridFunction,
    nl: &Nonlinearity,
) -> Result<(GridFunction, GridFunction)> {
    check_eps(eps, hat.m)?;
    let grid = *hat.grid();
    grid.ensure_same(tilde_v.grid(), "tilde_v")?;
    grid.ensure_same(tilde_u.grid(), "tilde_u")?;
    let (m, k) = (hat.m, hat.k);
    let omega = omega_of(eps, m);
    let m_minus_omega = eps * eps / (m + omega);
    let shift = 1.0 / (m + omega) - 1.0 / (2.0 * m);
    let fragile = nl.k() < 1.0;
    let len = grid.n_points();
    let mut g1 = Vec::with_capacity(len);
    let mut g2 = Vec::with_capacity(len);
    for i in 0..len {
        let (vh, uh) = (hat.vhat.values()[i], hat.uhat.values()[i]);
        let (v, u) = (vh + tilde_v.values()[i], uh + tilde_u.values()[i]);
        let s = scalar(eps, v, u);
        if fragile && (s < 0.0 || (s == 0.0 && (v != 0.0 || u != 0.0))) {
            return Err(Error::PositivityLost { t: grid.node(i) });
        }
        let g = nl.rescaled(eps, s);
        let p = vh.abs().powf(2.0 * k);
        g1.push(-g * v + p * vh + (1.0 + 2.0 * k) * p * tilde_v.values()[i] + shift * vh);
        g2.push(eps * eps * g * u + m_minus_omega * uh);
    }
    Ok((
        GridFunction::new(grid, g1, Parity::Even)?,
        GridFunction::new(grid, g2, Parity::Odd)?,
    ))
}

/// Picard iteration `W <- A(eps)^{-1} G(eps, W)` with a prefactored `A(eps)`.
pub fn solve_profile_fixed_point(
    eps: f64,
    hat: &HatPair,
    nl: &Nonlinearity,
    op: &FactorizedOperator,
    opts: &SolverOptions,
) -> Result<DiracProfile> {
    solve_profile_fixed_point_with_history(eps, hat, nl, op, opts).map(|(p, _)| p)
}

/// As [`solve_profile_fixed_point`], also returning `||W^{(j+1)} - W^{(j)}||_X` per iteration.
pub fn solve_profile_fixed_point_with_history(
    eps: f64,
    hat: &HatPair,
    nl: &Nonlinearity,
    op: &FactorizedOperator,
    opts: &SolverOptions,
) -> Result<(DiracProfile, Vec<f64>)> {
    opts.validate()?;
    check_eps(eps, hat.m)?;
    match op.op.kind {
        OperatorKind::Dirac { eps: e, .. } if e == eps => {}
        _ => {
            return Err(Error::InvalidParameter(format!(
                "operator was not assembled at eps = {eps}"
            )))
        }
    }
    let grid = *hat.grid();
    let (mut tv, mut tu) = match &opts.warm_start {
        Some((v, u)) => {
            grid.ensure_same(v.grid(), "warm start")?;
            grid.ensure_same(u.grid(), "warm start")?;
            (v.clone(), u.clone())
        }
        None => (
            GridFunction::zeros(grid, Parity::Even),
            GridFunction::zeros(grid, Parity::Odd),
        ),
    };
    let last = grid.n_points() - 1;
    let mut history = Vec::new();
    for iteration in 1..=opts.max_iterations {
        let (g1, g2) = eval_g(eps, hat, &tv, &tu, nl)?;
        let (g1, g2) = (dirichlet(g1, last)?, dirichlet(g2, last)?);
        let (nv, nu) = op.solve_pair(&g1, &g2)?;
        let d = opts.damping;
        let nv = tv.zip_with(&nv, |a, b| a + d * (b - a))?;
        let nu = tu.zip_with(&nu, |a, b| a + d * (b - a))?;
        let change = norm_x_pair(
            &nv.zip_with(&tv, |a, b| a - b)?,
            &nu.zip_with(&tu, |a, b| a - b)?,
        );
        history.push(change);
        tv = nv;
        tu = nu;
        if !change.is_finite() || change > 1e6 {
            return Err(Error::NoConvergence {
                iterations: iteration,
                last_change: change,
            });
        }
        if change < opts.tolerance {
            let mut profile = DiracProfile::from_tilde(eps, hat, tv, tu, iteration, 0.0)?;
            profile.residual = stationary_residual(&profile, nl);
            return Ok((profile, history));
        }
    }
    let last_change = history.last().copied().unwrap_or(f64::NAN);
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        last_change,
    })
}

fn dirichlet(g: GridFunction, last: usize) -> Result<GridFunction> {
    let (grid, parity) = (*g.grid(), g.parity());
    let mut values = g.into_values();
    values[last] = 0.0;
    GridFunction::new(grid, values, parity)
}

/// Assembles and factors `A(eps)`, then runs the fixed-point solver.
pub fn solve_profile(
    eps: f64,
    hat: &HatPair,
    nl: &Nonlinearity,
    opts: &SolverOptions,
) -> Result<DiracProfile> {
    let op = assemble_a(eps, hat, hat.grid())?.factorize()?;
    solve_profile_fixed_point(eps, hat, nl, &op, opts)
}

/// Max residual of both rescaled equations over all nodes but the last, with second-order
/// centered differences and `(n-1)U/t -> (n-1)U'(0)` at the origin.
pub fn stationary_residual(profile: &DiracProfile, nl: &Nonlinearity) -> f64 {
    let grid = profile.grid();
    let (eps, m, omega) = (profile.eps, profile.m, profile.omega);
    let dim = grid.dim() as f64;
    let h = grid.step();
    let (v, u) = (profile.v.values(), profile.u.values());
    let len = v.len();
    let centered = |x: &[f64], i: usize, sign: f64| {
        let left = if i == 0 { sign * x[1] } else { x[i - 1] };
        (x[i + 1] - left) / (2.0 * h)
    };
    (0..len - 1)
        .map(|i| {
            let g = nl.rescaled(eps, scalar(eps, v[i], u[i]));
            let du = centered(u, i, -1.0);
            let dv = centered(v, i, 1.0);
            let transport = if i == 0 {
                dim * du
            } else {
                du + (dim - 1.0) * u[i] / grid.node(i)
            };
            let r1 = transport + v[i] / (m + omega) - g * v[i];
            let r2 = dv + (m + omega) * u[i] - eps * eps * g * u[i];
            r1.abs().max(r2.abs())
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shot {
    Low,
    High,
}

struct Trajectory {
    v: Vec<f64>,
    u: Vec<f64>,
    verdict: Shot,
}

fn dirac_rhs(
    eps: f64,
    m: f64,
    n: usize,
    nl: &Nonlinearity,
) -> impl Fn(f64, [f64; 2]) -> [f64; 2] + '_ {
    let mw = m + omega_of(eps, m);
    let nm1 = n as f64 - 1.0;
    move |t, [v, u]| {
        let g = nl.rescaled(eps, scalar(eps, v, u));
        let dv = (eps * eps * g - mw) * u;
        let transport = if t == 0.0 { 0.0 } else { nm1 * u / t };
        [dv, (g - 1.0 / mw) * v - transport]
    }
}

fn shoot(eps: f64, m: f64, grid: &Grid, nl: &Nonlinearity, v0: f64, blowup: f64) -> Trajectory {
    let n = grid.dim();
    let f = dirac_rhs(eps, m, n, nl);
    let mw = m + omega_of(eps, m);
    let h = grid.step();
    // V = V0 + beta t^2, U = alpha t near the origin.
    let g0 = nl.rescaled(eps, v0 * v0);
    let alpha = (g0 - 1.0 / mw) * v0 / n as f64;
    let beta = (eps * eps * g0 - mw) * alpha / 2.0;
    let series = |t: f64| [v0 + beta * t * t, alpha * t];
    let mut v = vec![v0];
    let mut u = vec![0.0];
    let mut y = [v0, 0.0];
    for i in 0..grid.n_points() - 1 {
        let t = grid.node(i);
        y = advance(&f, t, y, h, series);
        let slope = f(t + h, y)[0];
        if !(y[0].is_finite() && y[1].is_finite())
            || y[0].abs() + y[1].abs() > blowup
            || slope > 0.0
        {
            return Trajectory {
                v,
                u,
                verdict: Shot::Low,
            };
        }
        if y[0] < 0.0 {
            return Trajectory {
                v,
                u,
                verdict: Shot::High,
            };
        }
        v.push(y[0]);
        u.push(y[1]);
    }
    let slope = f(grid.t_max(), y)[0];
    let verdict = if y[0] + slope > 0.0 {
        Shot::Low
    } else {
        Shot::High
    };
    Trajectory { v, u, verdict }
}

/// Shooting on `V(0)` for the rescaled system with `U(0) = 0`, independent of `A(eps)`.
///
/// Too large a `V(0)` drives `V` through zero; too small a one turns `V` back up. The far
/// field comes from inward integration off the decaying tail `V ~ r^{-nu} K_nu`,
/// `U = -V'/(m+w)`.
pub fn solve_profile_shooting(
    eps: f64,
    hat: &HatPair,
    nl: &Nonlinearity,
    opts: &ShootingOptions,
) -> Result<DiracProfile> {
    opts.validate()?;
    check_eps(eps, hat.m)?;
    let grid = *hat.grid();
    let m = hat.m;
    let vhat0 = hat.vhat.values()[0];
    let (mut lo, mut hi) = opts.v0_bracket.unwrap_or((0.5 * vhat0, 2.0 * vhat0));
    let blowup = opts.blowup_threshold;
    if shoot(eps, m, &grid, nl, lo, blowup).verdict != Shot::Low {
        return Err(Error::Bracket(format!("V(0) = {lo} does not undershoot")));
    }
    if shoot(eps, m, &grid, nl, hi, blowup).verdict != Shot::High {
        return Err(Error::Bracket(format!("V(0) = {hi} does not overshoot")));
    }
    let mut steps = 0;
    while hi - lo > opts.bisection_tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shoot(eps, m, &grid, nl, mid, blowup).verdict {
            Shot::Low => lo = mid,
            Shot::High => hi = mid,
        }
        steps += 1;
        if steps > 200 {
            return Err(Error::NoConvergence {
                iterations: steps,
                last_change: hi - lo,
            });
        }
    }
    let Trajectory { mut v, mut u, .. } = shoot(eps, m, &grid, nl, lo, blowup);
    let last = grid.n_points() - 1;
    let switch = v
        .iter()
        .position(|&x| x < opts.tail_switch * lo)
        .ok_or(Error::NoConvergence {
            iterations: steps,
            last_change: hi - lo,
        })?;
    if switch < last {
        let mw = m + omega_of(eps, m);
        let (value, slope) = radial_tail(grid.dim(), grid.node(switch), grid.t_max());
        let f = dirac_rhs(eps, m, grid.dim(), nl);
        let tail = match_inward_tail(
            f,
            |i| grid.node(i),
            switch,
            last,
            v[switch],
            |c| [c * value, -c * slope / mw],
        );
        v.truncate(switch + 1);
        u.truncate(switch);
        u.push(tail[0][1]);
        for y in &tail[1..] {
            v.push(y[0]);
            u.push(y[1]);
        }
    }
    let v = GridFunction::new(grid, v, Parity::Even)?;
    let u = GridFunction::new(grid, u, Parity::Odd)?;
    let mut profile = DiracProfile::from_full(eps, hat, v, u, steps, 0.0)?;
    profile.residual = stationary_residual(&profile, nl);
    Ok(profile)
}

/// Solves along strictly decreasing `eps`, warm-starting each point from the previous
/// correction rescaled by `(eps / eps_prev)^{2 kappa}`, its leading-order size.
///
/// A failing point truncates the branch and is recorded in [`Branch::failure`].
pub fn continue_branch(
    eps_values: &[f64],
    hat: &HatPair,
    nl: &Nonlinearity,
    opts: &SolverOptions,
    gamma: f64,
) -> Result<Branch> {
    opts.validate()?;
    for w in eps_values.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::InvalidParameter(format!(
                "eps values must decrease strictly ({} then {})",
                w[0], w[1]
            )));
        }
    }
    for &eps in eps_values {
        check_eps(eps, hat.m)?;
    }
    let mut branch = Branch::empty(hat.clone(), nl.clone());
    let mut warm = opts.warm_start.clone();
    let mut previous: Option<f64> = None;
    let two_kappa = 2.0 * nl.kappa();
    for &eps in eps_values {
        let start = match (&warm, previous) {
            (Some((v, u)), Some(prev)) => {
                let s = (eps / prev).powf(two_kappa);
                Some((v.scaled(s), u.scaled(s)))
            }
            (w, _) => w.clone(),
        };
        let point_opts = SolverOptions {
            warm_start: start,
            ..opts.clone()
        };
        let solved = solve_profile(eps, hat, nl, &point_opts).and_then(|p| {
            let point = diagnostics(&p, nl, gamma)?;
            Ok((p, point))
        });
        match solved {
            Ok((profile, point)) => {
                warm = Some((profile.tilde_v.clone(), profile.tilde_u.clone()));
                previous = Some(eps);
                branch.push(profile, point)?;
            }
            Err(e) => {
                branch.failure = Some((eps, e.to_string()));
                break;
            }
        }
    }
    Ok(branch)
}

fn diagnostics(p: &DiracProfile, nl: &Nonlinearity, gamma: f64) -> Result<BranchPoint> {
    Ok(BranchPoint {
        eps: p.eps,
        omega: p.omega,
        charge: charge(p),
        energy: energy(p, nl, &EnergyOptions::default()).ok(),
        norm_tilde_weighted: norm_x1_weighted_pair(&p.tilde_v, &p.tilde_u, gamma)?,
        iterations: p.iterations,
        residual: p.residual,
    })
}

/// Largest `eps` in `[lo, hi]` at which a cold-started iteration converges, found by bisection.
///
/// The bound is empirical: it depends on the grid, tolerance and iteration cap.
pub fn eps_ceiling(
    hat: &HatPair,
    nl: &Nonlinearity,
    opts: &SolverOptions,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<f64> {
    let converges = |eps: f64| solve_profile(eps, hat, nl, opts).is_ok();
    if !converges(lo) {
        return Err(Error::Bracket(format!(
            "no convergence at the lower end eps = {lo}"
        )));
    }
    if converges(hi) {
        return Ok(hi);
    }
    let (mut good, mut bad) = (lo, hi);
    for _ in 0..steps {
        let mid = 0.5 * (good + bad);
        if converges(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(good)
}

/// Samples of the physical profile `v(r) = eps^{1/k} V(eps r)`, `u(r) = eps^{1+1/k} U(eps r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalProfile {
    pub r: Vec<f64>,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
}

pub fn unscale(profile: &DiracProfile, r: &[f64]) -> Result<PhysicalProfile> {
    let (eps, k) = (profile.eps, profile.k);
    let a = eps.powf(1.0 / k);
    let mut v = Vec::with_capacity(r.len());
    let mut u = Vec::with_capacity(r.len());
    for &x in r {
        v.push(a * profile.v.interpolate(eps * x)?);
        u.push(eps * a * profile.u.interpolate(eps * x)?);
    }
    Ok(PhysicalProfile {
        r: r.to_vec(),
        v,
        u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groundstate::{closed_form_groundstate_1d, hat_pair};
    use crate::model::norms::norm_x;

    fn sech_hat(step: f64) -> HatPair {
        let g = Grid::with_step(30.0, step, 1).unwrap();
        let gs = closed_form_groundstate_1d(1.0, 1.0, &g);
        hat_pair(&gs, &gs.grid).unwrap()
    }

    fn zeros(hat: &HatPair) -> (GridFunction, GridFunction) {
        (
            GridFunction::zeros(*hat.grid(), Parity::Even),
            GridFunction::zeros(*hat.grid(), Parity::Odd),
        )
    }

    #[test]
    fn g_at_zero_correction_is_order_eps_squared() {
        let hat = sech_hat(0.01);
        let nl = Nonlinearity::pure_power(1.0).unwrap();
        let (z0, z1) = zeros(&hat);
        let ratios: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&eps| {
                let (g1, g2) = eval_g(eps, &hat, &z0, &z1, &nl).unwrap();
                norm_x_pair(&g1, &g2) / (eps * eps)
            })
            .collect();
        let (lo, hi) = ratios
            .iter()
            .fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
        assert!(hi / lo < 1.2, "{ratios:?}");
    }

    #[test]
    fn g2_vanishes_without_u() {
        let g = Grid::with_step(10.0, 0.1, 1).unwrap();
        let v = GridFunction::from_fn(g, Parity::Even, |t| 1.0 / t.cosh());
        let hat = HatPair::new(v, GridFunction::zeros(g, Parity::Odd), 1.0, 1.0).unwrap();
        let (z0, z1) = zeros(&hat);
        let (_, g2) = eval_g(0.1, &hat, &z0, &z1, &Nonlinearity::pure_power(1.0).unwrap()).unwrap();
        assert_eq!(g2.max_abs(), 0.0);
    }

    #[test]
    fn positivity_loss_is_reported_for_small_k() {
        let hat = sech_hat(0.05);
        let nl = Nonlinearity::pure_power(0.5).unwrap();
        let tv = hat.vhat.scaled(-1.0);
        let tu = GridFunction::zeros(*hat.grid(), Parity::Odd);
        assert!(matches!(
            eval_g(0.1, &hat, &tv, &tu, &nl),
            Err(Error::PositivityLost { .. })
        ));
    }

    #[test]
    fn fixed_point_and_shooting_agree() {
        let hat = sech_hat(0.01);
        let nl = Nonlinearity::pure_power(1.0).unwrap();
        let fp = solve_profile(0.05, &hat, &nl, &SolverOptions::default()).unwrap();
        let sh = solve_profile_shooting(0.05, &hat, &nl, &ShootingOptions::default()).unwrap();
        let dv = fp.v.zip_with(&sh.v, |a, b| (a - b).abs()).unwrap();
        let du = fp.u.zip_with(&sh.u, |a, b| (a - b).abs()).unwrap();
        let worst = dv.zip_with(&du, |a, b| a + b).unwrap().max_abs();
        assert!(worst < 1e-6, "{worst}");
        assert_eq!(sh.u.values()[0], 0.0);
        assert_eq!(fp.u.values()[0], 0.0);
    }

    #[test]
    fn corrections_shrink_and_iteration_contracts() {
        let hat = sech_hat(0.02);
        let nl = Nonlinearity::pure_power(1.0).unwrap();
        let mut sizes = Vec::new();
        let mut rates = Vec::new();
        for eps in [0.1, 0.05, 0.025, 0.0125] {
            let op = assemble_a(eps, &hat, hat.grid())
                .unwrap()
                .factorize()
                .unwrap();
            let (p, hist) =
                solve_profile_fixed_point_with_history(eps, &hat, &nl, &op, &Default::default())
                    .unwrap();
            sizes.push(norm_x_pair(&p.tilde_v, &p.tilde_u));
            rates.push(hist[2] / hist[1]);
        }
        assert!(sizes.windows(2).all(|w| w[1] < w[0]), "{sizes:?}");
        assert!(rates.iter().all(|&r| r < 1.0), "{rates:?}");
        assert!(rates[1..].windows(2).all(|w| w[1] < w[0]), "{rates:?}");
    }

    #[test]
    fn warm_start_saves_iterations_and_agrees() {
        let hat = sech_hat(0.02);
        let nl = Nonlinearity::pure_power(1.0).unwrap();
        let prev = solve_profile(0.05, &hat, &nl, &Default::default()).unwrap();
        let cold = solve_profile(0.045, &hat, &nl, &Default::default()).unwrap();
        let s = (0.045f64 / 0.05).powi(2);
        let start = (prev.tilde_v.scaled(s), prev.tilde_u.scaled(s));
        let opts = SolverOptions {
            warm_start: Some(start),
            ..Default::default()
        };
        let warm = solve_profile(0.045, &hat, &nl, &opts).unwrap();
        assert!(
            warm.iterations < cold.iterations,
            "{} vs {}",
            warm.iterations,
            cold.iterations
        );
        let diff = warm.tilde_v.zip_with(&cold.tilde_v, |a, b| a - b).unwrap();
        assert!(norm_x(&diff) < 1e-10);
    }

    #[test]
    fn residuals() {
        let hat = sech_hat(0.01);
        let nl = Nonlinearity::pure_power(1.0).unwrap();
        let (z0, z1) = zeros(&hat);
        let zero = DiracProfile::from_full(0.05, &hat, z0.clone(), z1.clone(), 0, 0.0).unwrap();
        assert_eq!(stationary_residual(&zero, &nl), 0.0);
        let bare = DiracProfile::from_tilde(0.05, &hat, z0, z1, 0, 0.0).unwrap();
        let r_hat = stationary_residual(&bare, &nl);
        let solved = solve_profile(0.05, &hat, &nl, &Default::default()).unwrap();
        assert!(r_hat > 1e-4, "{r_hat}");
        assert!(
            solved.residual < 1e-4 && solved.residual < r_hat / 10.0,
            "{}",
            solved.residual
        );
    }

    #[test]
    fn branch_bookkeeping() {
        let hat = sech_hat(0.02);
        let nl = Nonlinearity::pure_power(1.0).unwrap();
        let empty = continue_branch(&[], &hat, &nl, &Default::default(), 0.1).unwrap();
        assert!(empty.is_empty() && !empty.is_truncated());
        let b = continue_branch(&[0.1, 0.05, 0.02], &hat, &nl, &Default::default(), 0.1).unwrap();
        assert_eq!(b.len(), 3);
        for p in &b.points {
            assert!((p.omega * p.omega + p.eps * p.eps - 1.0).abs() < 1e-15);
        }
        assert!(continue_branch(&[0.05, 0.1], &hat, &nl, &Default::default(), 0.1).is_err());
    }

    #[test]
    fn unscaled_origin_value() {
        let hat = sech_hat(0.02);
        let nl = Nonlinearity::pure_power(1.0).unwrap();
        let p = solve_profile(0.05, &hat, &nl, &Default::default()).unwrap();
        let phys = unscale(&p, &[0.0, 10.0]).unwrap();
        assert_eq!(phys.v[0], 0.05 * p.v.values()[0]);
        assert!(unscale(&p, &[1e4]).is_err());
    }
}
