use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One higher-order term `coefficient * |tau|^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerTerm {
    pub coefficient: f64,
    pub exponent: f64,
}

/// Power-sum nonlinearity `f(tau) = |tau|^k + sum_i c_i |tau|^{K_i}` with every `K_i > k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Nonlinearity {
    k: f64,
    #[serde(default)]
    terms: Vec<PowerTerm>,
}

impl Nonlinearity {
    pub fn new(k: f64, terms: Vec<PowerTerm>) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "leading exponent k = {k} must be finite and positive"
            )));
        }
        for term in &terms {
            if !term.coefficient.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "coefficient {} is not finite",
                    term.coefficient
                )));
            }
            if !(term.exponent.is_finite() && term.exponent > k) {
                return Err(Error::InvalidParameter(format!(
                    "perturbation exponent K = {} must exceed k = {k}",
                    term.exponent
                )));
            }
        }
        Ok(Self { k, terms })
    }

    pub fn pure_power(k: f64) -> Result<Self> {
        Self::new(k, Vec::new())
    }

    /// Re-checks the invariants; used after deserialization.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.k, self.terms)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn is_pure_power(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest perturbation exponent, `None` for a pure power.
    pub fn min_perturbation_exponent(&self) -> Option<f64> {
        self.terms.iter().map(|t| t.exponent).reduce(f64::min)
    }

    pub fn eval_f(&self, tau: f64) -> f64 {
        let a = tau.abs();
        self.terms.iter().fold(a.powf(self.k), |acc, t| {
            acc + t.coefficient * a.powf(t.exponent)
        })
    }

    pub fn eval_f_prime(&self, tau: f64) -> Result<f64> {
        let singular = self.k < 1.0 || self.terms.iter().any(|t| t.exponent < 1.0);
        if tau == 0.0 {
            if singular {
                return Err(Error::Domain(
                    "f'(0) is singular for an exponent below 1".into(),
                ));
            }
            // sgn(0) = 0 kills every remaining term
            return Ok(0.0);
        }
        let a = tau.abs();
        let s = tau.signum();
        let leading = self.k * a.powf(self.k - 1.0) * s;
        Ok(self.terms.iter().fold(leading, |acc, t| {
            acc + t.coefficient * t.exponent * a.powf(t.exponent - 1.0) * s
        }))
    }

    /// Antiderivative `F(tau) = int_0^tau f`.
    #[allow(non_snake_case)]
    pub fn eval_F(&self, tau: f64) -> f64 {
        let a = tau.abs();
        self.terms
            .iter()
            .fold(a.powf(self.k) * tau / (self.k + 1.0), |acc, t| {
                acc + t.coefficient * a.powf(t.exponent) * tau / (t.exponent + 1.0)
            })
    }

    /// Rate exponent `min(1, K_min/k - 1)`; a pure power gets 1.
    pub fn kappa(&self) -> f64 {
        match self.min_perturbation_exponent() {
            Some(kmin) => (kmin / self.k - 1.0).min(1.0),
            None => 1.0,
        }
    }

    /// `f(eps^{2/k} s) / eps^2` evaluated without forming the tiny argument.
    ///
    /// For the power-sum family this is `|s|^k + sum_i c_i eps^{2K_i/k - 2} |s|^{K_i}`.
    pub fn rescaled(&self, eps: f64, s: f64) -> f64 {
        let a = s.abs();
        self.terms.iter().fold(a.powf(self.k), |acc, t| {
            acc + t.coefficient * eps.powf(2.0 * t.exponent / self.k - 2.0) * a.powf(t.exponent)
        })
    }

    /// Monotone majorant `H(tau) = sum_i |c_i| tau^{K_i - k}` for `tau >= 0`.
    pub fn majorant(&self, tau: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient.abs() * tau.max(0.0).powf(t.exponent - self.k))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(c: f64, k: f64) -> PowerTerm {
        PowerTerm {
            coefficient: c,
            exponent: k,
        }
    }

    #[test]
    fn f_values() {
        let cubic = Nonlinearity::pure_power(1.0).unwrap();
        assert_eq!(cubic.eval_f(0.0), 0.0);
        assert_eq!(cubic.eval_f(-2.0), 2.0);
        let nl = Nonlinearity::new(1.0, vec![term(1.0, 2.0)]).unwrap();
        assert_eq!(nl.eval_f(2.0), 6.0);
    }

    #[test]
    fn f_prime_values() {
        assert_eq!(
            Nonlinearity::pure_power(1.0)
                .unwrap()
                .eval_f_prime(5.0)
                .unwrap(),
            1.0
        );
        assert_eq!(
            Nonlinearity::pure_power(2.0)
                .unwrap()
                .eval_f_prime(-3.0)
                .unwrap(),
            -6.0
        );
        let half = Nonlinearity::pure_power(0.5).unwrap();
        assert!((half.eval_f_prime(4.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(half.eval_f_prime(0.0), Err(Error::Domain(_))));
        assert_eq!(
            Nonlinearity::pure_power(2.0)
                .unwrap()
                .eval_f_prime(0.0)
                .unwrap(),
            0.0
        );
    }

    #[test]
    #[allow(non_snake_case)]
    fn F_values() {
        let cubic = Nonlinearity::pure_power(1.0).unwrap();
        assert_eq!(cubic.eval_F(0.0), 0.0);
        assert_eq!(cubic.eval_F(2.0), 2.0);
        let quintic = Nonlinearity::pure_power(2.0).unwrap();
        assert!((quintic.eval_F(1.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn kappa_values() {
        let a = Nonlinearity::new(1.0, vec![term(0.1, 1.5)]).unwrap();
        assert!((a.kappa() - 0.5).abs() < 1e-15);
        let b = Nonlinearity::new(1.0, vec![term(0.1, 3.0)]).unwrap();
        assert_eq!(b.kappa(), 1.0);
        assert_eq!(Nonlinearity::pure_power(2.0).unwrap().kappa(), 1.0);
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(Nonlinearity::pure_power(0.0).is_err());
        assert!(Nonlinearity::new(1.0, vec![term(1.0, 0.5)]).is_err());
        assert!(Nonlinearity::new(1.0, vec![term(f64::NAN, 2.0)]).is_err());
    }

    #[test]
    fn rescaled_matches_direct_evaluation() {
        let nl = Nonlinearity::new(1.0, vec![term(0.5, 1.5)]).unwrap();
        let eps: f64 = 0.05;
        let s = 0.7;
        let direct = nl.eval_f(eps.powf(2.0 / nl.k()) * s) / (eps * eps);
        assert!((nl.rescaled(eps, s) - direct).abs() < 1e-12);
    }
}
