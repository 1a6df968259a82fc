//! Observables along solitary-wave branches and numerical checks of their predicted behaviour.

use serde::{Deserialize, Serialize};

use crate::dirac::{stationary_residual, unscale};
use crate::error::{Error, Result};
use crate::groundstate::envelope_samples;
use crate::model::grid::{quadrature, Grid, GridFunction};
use crate::model::nonlinearity::Nonlinearity;
use crate::model::norms::norm_x1_weighted_pair;
use crate::model::profile::{omega_of, Branch, DiracProfile, HatPair};

/// `Q = eps^{2/k-n} |S^{n-1}| int (V^2 + eps^2 U^2) t^{n-1} dt`.
pub fn charge(profile: &DiracProfile) -> f64 {
    let eps = profile.eps;
    let density: Vec<f64> = profile
        .v
        .values()
        .iter()
        .zip(profile.u.values())
        .map(|(v, u)| v * v + eps * eps * u * u)
        .collect();
    eps.powf(2.0 / profile.k - profile.dim() as f64)
        * quadrature::radial_integral(profile.grid(), &density)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyOptions {
    /// Largest stationary residual for which the on-shell identity is trusted.
    pub stale_threshold: f64,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        Self {
            stale_threshold: 1e-3,
        }
    }
}

/// `E = w Q + |S^{n-1}| int (f(s) s - F(s)) r^{n-1} dr` with the physical scalar `s = v^2 - u^2`.
///
/// The identity holds on solutions only, so profiles whose residual exceeds the threshold are
/// rejected.
pub fn energy(profile: &DiracProfile, nl: &Nonlinearity, opts: &EnergyOptions) -> Result<f64> {
    let residual = stationary_residual(profile, nl);
    if residual > opts.stale_threshold {
        return Err(Error::StaleProfile {
            residual,
            threshold: opts.stale_threshold,
        });
    }
    let eps = profile.eps;
    let lift = eps.powf(2.0 / profile.k);
    let density: Vec<f64> = profile
        .v
        .values()
        .iter()
        .zip(profile.u.values())
        .map(|(v, u)| {
            let s = lift * (v * v - eps * eps * u * u);
            nl.eval_f(s) * s - nl.eval_F(s)
        })
        .collect();
    let potential =
        eps.powf(-(profile.dim() as f64)) * quadrature::radial_integral(profile.grid(), &density);
    Ok(profile.omega * charge(profile) + potential)
}

/// Derivative of `y` at `x[i]` from the three-point Lagrange stencil on a nonuniform grid.
fn three_point(x: &[f64], y: &[f64], i: usize) -> f64 {
    let n = x.len();
    let c = i.clamp(1, n - 2);
    let (a, b, d) = (c - 1, c, c + 1);
    let (x0, x1, x2) = (x[a], x[b], x[d]);
    let t = x[i];
    y[a] * (2.0 * t - x1 - x2) / ((x0 - x1) * (x0 - x2))
        + y[b] * (2.0 * t - x0 - x2) / ((x1 - x0) * (x1 - x2))
        + y[d] * (2.0 * t - x0 - x1) / ((x2 - x0) * (x2 - x1))
}

/// `(omega, dQ/domega)` in increasing `omega`: centered in the interior, one-sided at the ends.
pub fn dq_domega(branch: &Branch) -> Result<Vec<(f64, f64)>> {
    let mut pts: Vec<(f64, f64)> = branch.points.iter().map(|p| (p.omega, p.charge)).collect();
    dq_domega_points(&mut pts)
}

/// Same as [`dq_domega`] on bare `(omega, Q)` samples.
pub fn dq_domega_points(points: &mut [(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let x: Vec<f64> = points.iter().map(|p| p.0).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    Ok((0..x.len())
        .map(|i| (x[i], three_point(&x, &y, i)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Positive,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VkVerdict {
    pub regime: Regime,
    /// `None` in the critical case when a perturbation exponent has `K <= 4/n`.
    pub expected_sign: Option<Sign>,
    pub measured_sign: Sign,
    /// Log-log slope of `|dQ/deps|` against `eps` over the three smallest `eps`.
    pub slope: Option<f64>,
}

const CRITICAL_TOL: f64 = 1e-12;

pub fn regime(k: f64, n: usize) -> Regime {
    let critical = 2.0 / n as f64;
    if (k - critical).abs() <= CRITICAL_TOL * critical {
        Regime::Critical
    } else if k < critical {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    }
}

/// Sign of `dQ/domega` near `omega = m` from the exponents, then measured on the branch.
pub fn vk_classify(nl: &Nonlinearity, branch: &Branch) -> Result<VkVerdict> {
    let samples: Vec<(f64, f64)> = branch.points.iter().map(|p| (p.omega, p.charge)).collect();
    vk_classify_samples(nl, branch.dim(), branch.hat.m, &samples)
}

/// [`vk_classify`] on bare `(omega, Q)` samples in dimension `n` with mass `m`.
pub fn vk_classify_samples(
    nl: &Nonlinearity,
    n: usize,
    m: f64,
    samples: &[(f64, f64)],
) -> Result<VkVerdict> {
    let regime = regime(nl.k(), n);
    let expected_sign = match regime {
        Regime::Subcritical => Some(Sign::Negative),
        Regime::Supercritical => Some(Sign::Positive),
        Regime::Critical => match nl.min_perturbation_exponent() {
            Some(kk) if kk <= 4.0 / n as f64 => None,
            _ => Some(Sign::Negative),
        },
    };
    let derivs = dq_domega_points(&mut samples.to_vec())?;
    // Increasing omega is decreasing eps: the last three entries are the smallest eps.
    let tail = &derivs[derivs.len() - 3..];
    let measured_sign = if tail.iter().all(|d| d.1 < 0.0) {
        Sign::Negative
    } else if tail.iter().all(|d| d.1 > 0.0) {
        Sign::Positive
    } else {
        Sign::Indeterminate
    };
    let slope = if regime == Regime::Critical {
        // dQ/deps = dQ/domega * domega/deps = -(eps/omega) dQ/domega
        let pts: Vec<(f64, f64)> = tail
            .iter()
            .map(|&(w, d)| {
                let eps = ((m - w) * (m + w)).sqrt();
                (eps.ln(), (eps / w * d).abs().ln())
            })
            .collect();
        Some(least_squares_slope(&pts)?)
    } else {
        None
    };
    Ok(VkVerdict {
        regime,
        expected_sign,
        measured_sign,
        slope,
    })
}

/// Slope of the least-squares line through `(x, y)`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: points.len(),
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("abscissae coincide".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    /// `min V / (2 eps |U|)` over nodes with `U != 0`.
    pub min_ratio_uv: f64,
    /// `min (V^2 - eps^2 U^2) / ((V^2 + eps^2 U^2) / 2)` over nodes with a nonzero field.
    pub min_scalar_ratio: f64,
    pub pass: bool,
}

pub fn positivity_report(profile: &DiracProfile) -> PositivityReport {
    let eps = profile.eps;
    let mut min_ratio_uv = f64::INFINITY;
    let mut min_scalar_ratio = f64::INFINITY;
    for (&v, &u) in profile.v.values().iter().zip(profile.u.values()) {
        if u != 0.0 {
            min_ratio_uv = min_ratio_uv.min(v / (2.0 * eps * u.abs()));
        }
        let mass = v * v + eps * eps * u * u;
        if mass > 0.0 {
            min_scalar_ratio = min_scalar_ratio.min((v * v - eps * eps * u * u) / (mass / 2.0));
        }
    }
    let pass = min_ratio_uv >= 1.0 && min_scalar_ratio >= 1.0;
    PositivityReport {
        min_ratio_uv,
        min_scalar_ratio,
        pass,
    }
}

/// `V > 0`, `U > 0` and `V/(4m) < U < 2V/m` on every node in `[t1, t_cut]`, where `t_cut` is the
/// last node with `V > 100 * f64::EPSILON`.
pub fn cone_region_check(profile: &DiracProfile, t1: f64) -> Result<bool> {
    let n = profile.dim() as f64;
    if t1 < 2.0 * n {
        return Err(Error::InvalidParameter(format!(
            "T1 = {t1} must be at least 2n = {}",
            2.0 * n
        )));
    }
    let m = profile.m;
    let grid = profile.grid();
    let (v, u) = (profile.v.values(), profile.u.values());
    let floor = 100.0 * f64::EPSILON;
    let Some(cut) = v.iter().rposition(|&x| x > floor) else {
        return Ok(false);
    };
    Ok((0..=cut)
        .filter(|&i| grid.node(i) >= t1)
        .all(|i| v[i] > 0.0 && u[i] > 0.0 && v[i] / (4.0 * m) < u[i] && u[i] < 2.0 * v[i] / m))
}

/// Phase-plane velocity `(dV/dt, dU/dt)` of the rescaled system at time `t`.
pub fn vector_field(
    eps: f64,
    m: f64,
    n: usize,
    nl: &Nonlinearity,
    t: f64,
    v: f64,
    u: f64,
) -> (f64, f64) {
    let mw = m + omega_of(eps, m);
    let g = nl.rescaled(eps, v * v - eps * eps * u * u);
    let dv = -mw * u + eps * eps * g * u;
    let du = -v / mw - (n as f64 - 1.0) * u / t + g * v;
    (dv, du)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InflowPiece {
    pub name: String,
    /// Sampled `(V, U)` and the inner-normal component of the velocity there.
    pub samples: Vec<(f64, f64, f64)>,
}

impl InflowPiece {
    pub fn min_dot(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.2)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InflowReport {
    pub pieces: Vec<InflowPiece>,
    pub pass: bool,
}

pub struct InflowSetup<'a> {
    pub eps: f64,
    pub nl: &'a Nonlinearity,
    pub hat: &'a HatPair,
    pub delta: f64,
    pub nu: f64,
    pub t: f64,
    pub sample_count: usize,
}

/// Samples the straight boundary pieces of
/// `K+ = {U >= max(0, (V+nu)/m, 2V/m)}` and `K- = {V >= 0, U <= min((V-nu)/(2m), V/(4m))}`
/// inside the disc of radius `delta` and checks that the velocity points inward.
pub fn boundary_inflow_check(setup: &InflowSetup) -> Result<InflowReport> {
    let InflowSetup {
        eps,
        nl,
        hat,
        delta,
        nu,
        t,
        sample_count,
    } = *setup;
    let m = hat.m;
    let n = hat.grid().dim();
    if !(delta > 0.0 && nu > 0.0 && nu < delta && sample_count >= 2) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < nu < delta and at least two samples (delta = {delta}, nu = {nu})"
        )));
    }
    if t < 2.0 * n as f64 {
        return Err(Error::InvalidParameter(format!(
            "t = {t} must be at least 2n"
        )));
    }
    let field = |v: f64, u: f64| vector_field(eps, m, n, nl, t, v, u);
    // Largest V on the line U = c V inside the disc.
    let disc_end = |c: f64| delta / (1.0 + c * c).sqrt();
    let lin = |a: f64, b: f64, j: usize| a + (b - a) * j as f64 / (sample_count - 1) as f64;
    let piece =
        |name: &str, a: f64, b: f64, point: &dyn Fn(f64) -> (f64, f64), normal: (f64, f64)| {
            let samples = (0..sample_count)
                .map(|j| {
                    let s = lin(a, b, j);
                    let (v, u) = point(s);
                    let (dv, du) = field(v, u);
                    (v, u, normal.0 * dv + normal.1 * du)
                })
                .collect();
            InflowPiece {
                name: name.into(),
                samples,
            }
        };
    let pieces = vec![
        piece("K+: U = 0", -delta, -nu, &|v| (v, 0.0), (0.0, 1.0)),
        piece(
            "K+: U = (V+nu)/m",
            -nu,
            nu,
            &|v| (v, (v + nu) / m),
            (-1.0, m),
        ),
        piece(
            "K+: U = 2V/m",
            nu,
            disc_end(2.0 / m),
            &|v| (v, 2.0 * v / m),
            (-2.0, m),
        ),
        piece(
            "K-: V = 0",
            -delta,
            -nu / (2.0 * m),
            &|u| (0.0, u),
            (1.0, 0.0),
        ),
        piece(
            "K-: U = (V-nu)/(2m)",
            0.0,
            2.0 * nu,
            &|v| (v, (v - nu) / (2.0 * m)),
            (1.0, -2.0 * m),
        ),
        piece(
            "K-: U = V/(4m)",
            2.0 * nu,
            disc_end(1.0 / (4.0 * m)),
            &|v| (v, v / (4.0 * m)),
            (1.0, -4.0 * m),
        ),
    ];
    let pass = pieces.iter().all(|p| p.min_dot() > 0.0);
    Ok(InflowReport { pieces, pass })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub window: (f64, f64),
    /// Bounds of `V(t) <t>^{(n-1)/2} e^t` over the window nodes.
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Least-squares slope of `log V` against `t`.
    pub rate_estimate: f64,
}

pub fn decay_fit(v: &GridFunction, window: (f64, f64)) -> Result<DecayFit> {
    let samples = envelope_samples(v, window.0, window.1)?;
    let (ratio_min, ratio_max) = samples.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), s| {
        (lo.min(s.2), hi.max(s.2))
    });
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.0, s.1.ln())).collect();
    Ok(DecayFit {
        window,
        ratio_min,
        ratio_max,
        rate_estimate: least_squares_slope(&pts)?,
    })
}

/// Log-log slope of `||e^{gamma <t>} (tilde_V, tilde_U)||_{H^1}` against `eps`.
pub fn error_scaling_fit(branch: &Branch, gamma: f64) -> Result<f64> {
    if branch.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            got: branch.len(),
        });
    }
    let pts = branch
        .profiles
        .iter()
        .map(|p| {
            Ok((
                p.eps.ln(),
                norm_x1_weighted_pair(&p.tilde_v, &p.tilde_u, gamma)?.ln(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    least_squares_slope(&pts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DphiScaling {
    /// `(eps, ||d_omega phi||^2)` at interior branch points.
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    /// Fitted `c` in `||d_omega phi||^2 ~ c eps^slope`.
    pub constant: f64,
}

/// `||d_omega phi_omega||^2_{L^2}` from centered differences of the physical profiles.
///
/// Each interior point uses the physical radius grid `t / eps_big` of its three-point stencil,
/// where `eps_big` is the largest of the three, so every profile is sampled inside its grid.
pub fn dphi_domega_scaling(branch: &Branch) -> Result<DphiScaling> {
    if branch.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            got: branch.len(),
        });
    }
    let grid = *branch.hat.grid();
    let omegas: Vec<f64> = branch.profiles.iter().map(|p| p.omega).collect();
    let mut samples = Vec::new();
    for i in 1..branch.len() - 1 {
        let eps_big = branch.profiles[i - 1].eps;
        let r: Vec<f64> = grid.nodes().iter().map(|t| t / eps_big).collect();
        let phys = (i - 1..=i + 1)
            .map(|j| unscale(&branch.profiles[j], &r))
            .collect::<Result<Vec<_>>>()?;
        let x = &omegas[i - 1..=i + 1];
        let mut density = Vec::with_capacity(r.len());
        for node in 0..r.len() {
            let dv = three_point(x, &[phys[0].v[node], phys[1].v[node], phys[2].v[node]], 1);
            let du = three_point(x, &[phys[0].u[node], phys[1].u[node], phys[2].u[node]], 1);
            density.push(dv * dv + du * du);
        }
        let rgrid = Grid::new(grid.t_max() / eps_big, grid.n_points(), grid.dim())?;
        samples.push((
            branch.profiles[i].eps,
            quadrature::radial_integral(&rgrid, &density),
        ));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(e, q)| (e.ln(), q.ln())).collect();
    let slope = least_squares_slope(&pts)?;
    let n = pts.len() as f64;
    let intercept = pts.iter().map(|p| p.1 - slope * p.0).sum::<f64>() / n;
    Ok(DphiScaling {
        samples,
        slope,
        constant: intercept.exp(),
    })
}

/// `q1 = int (4m vhat^{2k} uhat^2 + uhat^2)`, `q2 = int (vhat^2/(4m^2) + 2m vhat^{2k} uhat^2 + uhat^2)`
/// over `R^n`.
pub fn q1_q2(hat: &HatPair) -> (f64, f64) {
    let (m, k) = (hat.m, hat.k);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (&v, &u) in hat.vhat.values().iter().zip(hat.uhat.values()) {
        let p = v.abs().powf(2.0 * k) * u * u;
        a.push(4.0 * m * p + u * u);
        b.push(v * v / (4.0 * m * m) + 2.0 * m * p + u * u);
    }
    let grid = hat.grid();
    (
        quadrature::radial_integral(grid, &a),
        quadrature::radial_integral(grid, &b),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckPoint {
    pub eps: f64,
    /// `<vhat, d_eps tilde_V>` over `R^n`.
    pub inner_product: f64,
    /// `eps q1 + eps (1/k - n/2) q2`.
    pub predicted: f64,
    pub relative_deviation: f64,
}

pub fn inner_product_crosscheck(branch: &Branch) -> Result<Vec<CrosscheckPoint>> {
    if branch.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: branch.len(),
        });
    }
    let hat = &branch.hat;
    let grid = *hat.grid();
    let n = grid.dim() as f64;
    let (q1, q2) = q1_q2(hat);
    let eps: Vec<f64> = branch.profiles.iter().map(|p| p.eps).collect();
    let mut out = Vec::new();
    for i in 1..branch.len() - 1 {
        let x = &eps[i - 1..=i + 1];
        let density: Vec<f64> = (0..grid.n_points())
            .map(|node| {
                let y: Vec<f64> = (i - 1..=i + 1)
                    .map(|j| branch.profiles[j].tilde_v.values()[node])
                    .collect();
                hat.vhat.values()[node] * three_point(x, &y, 1)
            })
            .collect();
        let inner_product = quadrature::radial_integral(&grid, &density);
        let e = eps[i];
        let predicted = e * q1 + e * (1.0 / hat.k - n / 2.0) * q2;
        out.push(CrosscheckPoint {
            eps: e,
            inner_product,
            predicted,
            relative_deviation: ((inner_product - predicted) / predicted).abs(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBound {
    pub h: f64,
    pub two_kappa: f64,
}

/// `h(eps) = max(H(4 Lambda_k^2 eps^{2/k}), eps^{2k}, eps^2)` and the exponent `2 kappa`.
pub fn predicted_error_bounds(nl: &Nonlinearity, lambda_k: f64, eps: f64) -> Result<ErrorBound> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} must lie in (0, 1)"
        )));
    }
    let k = nl.k();
    let tau = eps.powf(2.0 / k) * 4.0 * lambda_k * lambda_k;
    let h = nl.majorant(tau).max(eps.powf(2.0 * k)).max(eps * eps);
    Ok(ErrorBound {
        h,
        two_kappa: 2.0 * nl.kappa(),
    })
}
