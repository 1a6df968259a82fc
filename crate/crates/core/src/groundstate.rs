//! Radial groundstate of `u'' + (n-1)u'/r = u - 2m u^{2k+1}` and the derived hat pair.

use crate::error::{Error, Result};
use crate::model::grid::{Grid, GridFunction, Parity};
use crate::model::norms::bracket;
use crate::model::profile::HatPair;
use crate::ode::{advance, match_inward_tail, radial_tail};

#[derive(Debug, Clone, PartialEq)]
pub struct GroundstateProfile {
    pub grid: Grid,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub n: usize,
    pub k: f64,
    pub m: f64,
    pub u0: f64,
}

impl GroundstateProfile {
    /// `u''` recovered from the equation itself, with `(n-1)u'/r -> (n-1)u''` at the origin.
    pub fn second_derivative(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.grid
            .nodes()
            .iter()
            .zip(self.u.iter().zip(&self.du))
            .map(|(&r, (&u, &du))| {
                let source = u - 2.0 * self.m * u.abs().powf(2.0 * self.k) * u;
                if r == 0.0 {
                    source / n
                } else {
                    source - (n - 1.0) * du / r
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundstateOptions {
    /// Relative bracket width at which bisection stops.
    pub bisection_tol: f64,
    pub max_bisections: usize,
    /// Below `tail_switch * u0` the profile comes from inward integration off the decaying tail.
    pub tail_switch: f64,
    /// Largest admissible `u(t_max) / u0`.
    pub truncation_tol: f64,
}

impl Default for GroundstateOptions {
    fn default() -> Self {
        Self {
            bisection_tol: 1e-15,
            max_bisections: 200,
            tail_switch: 1e-3,
            truncation_tol: 1e-12,
        }
    }
}

/// `2/(n-2)` for `n >= 3`, infinite otherwise.
pub fn critical_sobolev_limit(n: usize) -> f64 {
    if n >= 3 {
        2.0 / (n as f64 - 2.0)
    } else {
        f64::INFINITY
    }
}

pub fn validate_exponent(n: usize, k: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "dimension must be at least 1".into(),
        ));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParameter(format!("k = {k} must be positive")));
    }
    let limit = critical_sobolev_limit(n);
    if k >= limit {
        return Err(Error::InvalidExponent { n, k, limit });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shot {
    /// Turned back up before decaying: amplitude too small.
    Low,
    /// Crossed zero: amplitude too large.
    High,
}

struct Trajectory {
    u: Vec<f64>,
    du: Vec<f64>,
    verdict: Shot,
}

fn rhs(n: usize, k: f64, m: f64) -> impl Fn(f64, [f64; 2]) -> [f64; 2] {
    let nm1 = n as f64 - 1.0;
    move |r, [u, du]| {
        let source = u - 2.0 * m * u.abs().powf(2.0 * k) * u;
        let ddu = if r == 0.0 {
            source / n as f64
        } else {
            source - nm1 * du / r
        };
        [du, ddu]
    }
}

fn shoot(grid: &Grid, n: usize, k: f64, m: f64, u0: f64, ceiling: f64) -> Trajectory {
    let f = rhs(n, k, m);
    let h = grid.step();
    let mut u = vec![u0];
    let mut du = vec![0.0];
    let mut y = [u0, 0.0];
    let nf = n as f64;
    // u = u0 + a r^2 + O(r^4) with 2n a = u0 - 2m u0^{2k+1}
    let a = (u0 - 2.0 * m * u0.abs().powf(2.0 * k) * u0) / (2.0 * nf);
    let series = |r: f64| [u0 + a * r * r, 2.0 * a * r];
    for i in 0..grid.n_points() - 1 {
        y = advance(&f, grid.node(i), y, h, series);
        if !(y[0].is_finite() && y[1].is_finite()) || y[0] > ceiling || y[1] > 0.0 {
            return Trajectory {
                u,
                du,
                verdict: Shot::Low,
            };
        }
        if y[0] < 0.0 {
            return Trajectory {
                u,
                du,
                verdict: Shot::High,
            };
        }
        u.push(y[0]);
        du.push(y[1]);
    }
    // Survived the whole grid: the sign of u + u' tells which side of the decaying solution we are on.
    let verdict = if y[0] + y[1] > 0.0 {
        Shot::Low
    } else {
        Shot::High
    };
    Trajectory { u, du, verdict }
}

/// Groundstate by bisection on `u(0)`, with the far field replaced by the exact linear tail.
pub fn solve_groundstate(
    n: usize,
    k: f64,
    m: f64,
    grid: &Grid,
    opts: &GroundstateOptions,
) -> Result<GroundstateProfile> {
    validate_exponent(n, k)?;
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidParameter(format!("m = {m} must be positive")));
    }
    let grid = grid.with_dim(n)?;
    let base = (1.0 / (2.0 * m)).powf(1.0 / (2.0 * k));
    let (mut lo, mut hi) = (base, 10.0 * base);
    let ceiling = |hi: f64| 2.0 * hi;

    let mut widen = 0;
    while shoot(&grid, n, k, m, hi, ceiling(hi)).verdict != Shot::High {
        hi *= 2.0;
        widen += 1;
        if widen > 60 {
            return Err(Error::NoConvergence {
                iterations: widen,
                last_change: hi,
            });
        }
    }
    while shoot(&grid, n, k, m, lo, ceiling(hi)).verdict != Shot::Low {
        lo *= 0.5;
        widen += 1;
        if widen > 120 {
            return Err(Error::NoConvergence {
                iterations: widen,
                last_change: lo,
            });
        }
    }

    for _ in 0..opts.max_bisections {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= opts.bisection_tol * hi || mid <= lo || mid >= hi {
            break;
        }
        match shoot(&grid, n, k, m, mid, ceiling(hi)).verdict {
            Shot::Low => lo = mid,
            Shot::High => hi = mid,
        }
    }

    let traj = shoot(&grid, n, k, m, lo, ceiling(hi));
    let (u, du) = attach_tail(&grid, n, k, m, lo, traj, opts.tail_switch)?;
    let last = *u.last().expect("non-empty");
    if last > opts.truncation_tol * lo {
        return Err(Error::OutOfRange(format!(
            "u(t_max)/u(0) = {:e} exceeds truncation tolerance {:e}; enlarge t_max",
            last / lo,
            opts.truncation_tol
        )));
    }
    Ok(GroundstateProfile {
        grid,
        u,
        du,
        n,
        k,
        m,
        u0: lo,
    })
}

/// Keeps the outward trajectory down to `tail_switch * u0` and replaces the rest by an inward
/// integration of the full equation seeded with `r^{-nu} K_nu(r)` at `t_max`.
fn attach_tail(
    grid: &Grid,
    n: usize,
    k: f64,
    m: f64,
    u0: f64,
    traj: Trajectory,
    tail_switch: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let Trajectory { mut u, mut du, .. } = traj;
    let switch = match u.iter().position(|&v| v < tail_switch * u0) {
        Some(i) => i,
        None => {
            // Separation happened first: use the node whose log-derivative is closest to the tail's.
            let nu = grid.dim() as f64;
            (1..u.len())
                .filter(|&i| grid.node(i) >= 1.0)
                .min_by(|&a, &b| {
                    let miss = |i: usize| {
                        let r = grid.node(i);
                        (du[i] / u[i] + 1.0 + (nu - 1.0) / (2.0 * r)).abs()
                    };
                    miss(a).total_cmp(&miss(b))
                })
                .unwrap_or(u.len() - 1)
        }
    };
    if switch == 0 {
        return Err(Error::NoConvergence {
            iterations: 0,
            last_change: u0,
        });
    }
    let last = grid.n_points() - 1;
    if switch == last {
        return Ok((u, du));
    }
    let target = u[switch];
    let (value, slope) = radial_tail(n, grid.node(switch), grid.t_max());
    let tail = match_inward_tail(
        rhs(n, k, m),
        |i| grid.node(i),
        switch,
        last,
        target,
        |c| [c * value, c * slope],
    );
    u.truncate(switch);
    du.truncate(switch);
    u.push(target);
    du.push(tail[0][1]);
    for y in &tail[1..] {
        u.push(y[0]);
        du.push(y[1]);
    }
    Ok((u, du))
}

/// `u(x) = ((k+1)/(2m))^{1/(2k)} sech^{1/k}(kx)`, the exact one-dimensional groundstate.
pub fn closed_form_groundstate_1d(k: f64, m: f64, grid: &Grid) -> GroundstateProfile {
    let grid = grid.with_dim(1).expect("dimension 1 is valid");
    let amp = ((k + 1.0) / (2.0 * m)).powf(1.0 / (2.0 * k));
    let u: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&x| amp * (1.0 / (k * x).cosh()).powf(1.0 / k))
        .collect();
    let du = grid
        .nodes()
        .iter()
        .zip(&u)
        .map(|(&x, &v)| -v * (k * x).tanh())
        .collect();
    GroundstateProfile {
        grid,
        u0: u[0],
        u,
        du,
        n: 1,
        k,
        m,
    }
}

/// `vhat(t) = u_k(|t|)`, `uhat = -vhat'/(2m)`, using the integrator's derivative samples.
pub fn hat_pair(gs: &GroundstateProfile, grid: &Grid) -> Result<HatPair> {
    gs.grid.ensure_same(grid, "hat_pair")?;
    let vhat = GridFunction::new(*grid, gs.u.clone(), Parity::Even)?;
    let uhat = GridFunction::new(
        *grid,
        gs.du.iter().map(|d| -d / (2.0 * gs.m)).collect(),
        Parity::Odd,
    )?;
    HatPair::new(vhat, uhat, gs.m, gs.k)
}

/// Max over all nodes but the last of the second-order residual of the groundstate equation.
pub fn groundstate_residual(gs: &GroundstateProfile) -> f64 {
    let h = gs.grid.step();
    let n = gs.n as f64;
    let u = &gs.u;
    let len = u.len();
    (0..len - 1)
        .map(|i| {
            let left = if i == 0 { u[1] } else { u[i - 1] };
            let lap = (u[i + 1] - 2.0 * u[i] + left) / (h * h);
            let radial = if i == 0 {
                (n - 1.0) * lap
            } else {
                (n - 1.0) / gs.grid.node(i) * (u[i + 1] - left) / (2.0 * h)
            };
            let source = u[i] - 2.0 * gs.m * u[i].abs().powf(2.0 * gs.k) * u[i];
            (lap + radial - source).abs()
        })
        .fold(0.0, f64::max)
}

/// `Lambda_k = sup |vhat| + m sup |uhat|`.
pub fn lambda_k(hat: &HatPair) -> f64 {
    hat.vhat.max_abs() + hat.m * hat.uhat.max_abs()
}

/// `min` and `max` of `u(t) <t>^{(n-1)/2} e^t` over `[t_lo, t_hi]`.
pub fn decay_constants(gs: &GroundstateProfile, t_lo: f64, t_hi: f64) -> Result<(f64, f64)> {
    let f = GridFunction::new(gs.grid, gs.u.clone(), Parity::Even)?;
    envelope_bounds(&f, t_lo, t_hi)
}

/// Bounds of `g(t) <t>^{(n-1)/2} e^t` over a window, endpoints included by interpolation.
pub fn envelope_bounds(g: &GridFunction, t_lo: f64, t_hi: f64) -> Result<(f64, f64)> {
    let samples = envelope_samples(g, t_lo, t_hi)?;
    let lo = samples.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let hi = samples
        .iter()
        .map(|s| s.2)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// `(t, g(t), g(t) <t>^{(n-1)/2} e^t)` over the window.
pub fn envelope_samples(g: &GridFunction, t_lo: f64, t_hi: f64) -> Result<Vec<(f64, f64, f64)>> {
    let grid = g.grid();
    if !(t_lo >= 0.0 && t_lo <= t_hi && t_hi <= grid.t_max()) {
        return Err(Error::Window {
            lo: t_lo,
            hi: t_hi,
            t_max: grid.t_max(),
        });
    }
    let half = (grid.dim() as f64 - 1.0) / 2.0;
    let mut ts = vec![t_lo];
    ts.extend(grid.nodes().into_iter().filter(|&t| t > t_lo && t < t_hi));
    if t_hi > t_lo {
        ts.push(t_hi);
    }
    ts.into_iter()
        .map(|t| {
            let v = g.interpolate(t)?;
            if v.is_nan() || v <= 1e-300 {
                return Err(Error::Window {
                    lo: t_lo,
                    hi: t_hi,
                    t_max: grid.t_max(),
                });
            }
            Ok((t, v, v * bracket(t).powf(half) * t.exp()))
        })
        .collect()
}
