use serde::{Deserialize, Serialize};

use super::grid::{Grid, GridFunction, Parity};
use super::nonlinearity::Nonlinearity;
use crate::error::{Error, Result};

/// Limiting pair: `vhat(t) = u_k(|t|)` (even) and `uhat = -vhat' / (2m)` (odd).
#[derive(Debug, Clone, PartialEq)]
pub struct HatPair {
    pub vhat: GridFunction,
    pub uhat: GridFunction,
    pub m: f64,
    pub k: f64,
}

impl HatPair {
    pub fn new(vhat: GridFunction, uhat: GridFunction, m: f64, k: f64) -> Result<Self> {
        vhat.grid().ensure_same(uhat.grid(), "hat pair")?;
        if vhat.parity() != Parity::Even || uhat.parity() != Parity::Odd {
            return Err(Error::InvalidParameter(
                "hat pair must be (even, odd)".into(),
            ));
        }
        if !(m > 0.0 && k > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "m = {m}, k = {k} must be positive"
            )));
        }
        Ok(Self { vhat, uhat, m, k })
    }

    pub fn grid(&self) -> &Grid {
        self.vhat.grid()
    }

    /// Max over nodes of `|vhat' + 2m uhat|` with a fourth-order derivative.
    pub fn derivative_residual(&self) -> f64 {
        let dv = self.vhat.derivative();
        let n = self.grid().n_points();
        dv.values()
            .iter()
            .zip(self.uhat.values())
            .take(n - 2)
            .map(|(d, u)| (d + 2.0 * self.m * u).abs())
            .fold(0.0, f64::max)
    }
}

/// One solitary wave in rescaled variables, split as `V = vhat + tilde_v`, `U = uhat + tilde_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracProfile {
    pub eps: f64,
    pub omega: f64,
    pub m: f64,
    pub k: f64,
    pub v: GridFunction,
    pub u: GridFunction,
    pub tilde_v: GridFunction,
    pub tilde_u: GridFunction,
    pub iterations: usize,
    pub residual: f64,
}

impl DiracProfile {
    /// Builds the profile from the corrections; `omega` is derived from `eps` and `m`.
    pub fn from_tilde(
        eps: f64,
        hat: &HatPair,
        tilde_v: GridFunction,
        tilde_u: GridFunction,
        iterations: usize,
        residual: f64,
    ) -> Result<Self> {
        check_eps(eps, hat.m)?;
        hat.grid().ensure_same(tilde_v.grid(), "tilde_v")?;
        hat.grid().ensure_same(tilde_u.grid(), "tilde_u")?;
        let v = hat.vhat.zip_with(&tilde_v, |a, b| a + b)?;
        let u = hat.uhat.zip_with(&tilde_u, |a, b| a + b)?;
        Ok(Self {
            eps,
            omega: omega_of(eps, hat.m),
            m: hat.m,
            k: hat.k,
            v,
            u,
            tilde_v,
            tilde_u,
            iterations,
            residual,
        })
    }

    /// Builds the profile from full `(V, U)`; the corrections are taken against `hat`.
    pub fn from_full(
        eps: f64,
        hat: &HatPair,
        v: GridFunction,
        u: GridFunction,
        iterations: usize,
        residual: f64,
    ) -> Result<Self> {
        let tilde_v = v.zip_with(&hat.vhat, |a, b| a - b)?;
        let tilde_u = u.zip_with(&hat.uhat, |a, b| a - b)?;
        let mut p = Self::from_tilde(eps, hat, tilde_v, tilde_u, iterations, residual)?;
        p.v = GridFunction::new(*hat.grid(), v.into_values(), Parity::Even)?;
        p.u = GridFunction::new(*hat.grid(), u.into_values(), Parity::Odd)?;
        Ok(p)
    }

    pub fn grid(&self) -> &Grid {
        self.v.grid()
    }

    pub fn dim(&self) -> usize {
        self.grid().dim()
    }
}

pub fn omega_of(eps: f64, m: f64) -> f64 {
    ((m - eps) * (m + eps)).sqrt()
}

pub fn check_eps(eps: f64, m: f64) -> Result<()> {
    if eps > 0.0 && eps < m {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "eps = {eps} must lie in (0, m = {m})"
        )))
    }
}

/// Per-point observables recorded along a branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub eps: f64,
    pub omega: f64,
    pub charge: f64,
    pub energy: Option<f64>,
    pub norm_tilde_weighted: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Profiles ordered by strictly decreasing `eps`, all on the hat pair's grid.
#[derive(Debug, Clone)]
pub struct Branch {
    pub profiles: Vec<DiracProfile>,
    pub points: Vec<BranchPoint>,
    pub hat: HatPair,
    pub nonlinearity: Nonlinearity,
    /// Set when continuation stopped early: `(eps that failed, reason)`.
    pub failure: Option<(f64, String)>,
}

impl Branch {
    pub fn empty(hat: HatPair, nonlinearity: Nonlinearity) -> Self {
        Self {
            profiles: Vec::new(),
            points: Vec::new(),
            hat,
            nonlinearity,
            failure: None,
        }
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.hat.grid().dim()
    }

    pub fn is_truncated(&self) -> bool {
        self.failure.is_some()
    }

    pub fn push(&mut self, profile: DiracProfile, point: BranchPoint) -> Result<()> {
        if let Some(last) = self.profiles.last() {
            if profile.eps >= last.eps {
                return Err(Error::InvalidParameter(format!(
                    "eps must decrease along a branch ({} after {})",
                    profile.eps, last.eps
                )));
            }
        }
        self.hat
            .grid()
            .ensure_same(profile.grid(), "branch profile")?;
        self.profiles.push(profile);
        self.points.push(point);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hat() -> HatPair {
        let g = Grid::with_step(20.0, 0.01, 1).unwrap();
        let v = GridFunction::from_fn(g, Parity::Even, |t| 1.0 / t.cosh());
        let u = GridFunction::from_fn(g, Parity::Odd, |t| t.tanh() / t.cosh() / 2.0);
        HatPair::new(v, u, 1.0, 1.0).unwrap()
    }

    #[test]
    fn omega_relation() {
        for eps in [0.1, 0.05, 1e-3, 0.999] {
            let w = omega_of(eps, 1.0);
            assert!((w * w + eps * eps - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn decomposition_holds() {
        let h = hat();
        let g = *h.grid();
        let tv = GridFunction::from_fn(g, Parity::Even, |t| 0.01 * (-t * t).exp());
        let tu = GridFunction::from_fn(g, Parity::Odd, |t| 0.01 * t * (-t * t).exp());
        let p = DiracProfile::from_tilde(0.05, &h, tv, tu, 3, 0.0).unwrap();
        assert_eq!(p.u.values()[0], 0.0);
        for i in 0..g.n_points() {
            assert_eq!(p.v.values()[i], h.vhat.values()[i] + p.tilde_v.values()[i]);
        }
        assert!(
            DiracProfile::from_tilde(1.5, &h, p.tilde_v.clone(), p.tilde_u.clone(), 0, 0.0)
                .is_err()
        );
    }

    #[test]
    fn sech_hat_satisfies_derivative_relation() {
        assert!(hat().derivative_residual() < 1e-8);
    }

    #[test]
    fn branch_requires_decreasing_eps() {
        let h = hat();
        let g = *h.grid();
        let mut b = Branch::empty(h.clone(), Nonlinearity::pure_power(1.0).unwrap());
        let z = |p| GridFunction::zeros(g, p);
        let point = |eps| BranchPoint {
            eps,
            omega: omega_of(eps, 1.0),
            charge: 0.0,
            energy: None,
            norm_tilde_weighted: 0.0,
            iterations: 0,
            residual: 0.0,
        };
        let p1 =
            DiracProfile::from_tilde(0.1, &h, z(Parity::Even), z(Parity::Odd), 0, 0.0).unwrap();
        let p2 =
            DiracProfile::from_tilde(0.2, &h, z(Parity::Even), z(Parity::Odd), 0, 0.0).unwrap();
        b.push(p1, point(0.1)).unwrap();
        assert!(b.push(p2, point(0.2)).is_err());
        assert_eq!(b.len(), 1);
    }
}
