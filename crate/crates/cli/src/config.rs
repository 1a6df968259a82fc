use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use soler_core::groundstate::validate_exponent;
use soler_core::model::{Grid, Nonlinearity, PowerTerm};

use crate::failure::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Geometric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub t_max: f64,
    pub n_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            t_max: 30.0,
            n_points: 3001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpsSchedule {
    pub eps_max: f64,
    pub eps_min: f64,
    pub steps: usize,
    pub spacing: Spacing,
}

impl Default for EpsSchedule {
    fn default() -> Self {
        Self {
            eps_max: 0.1,
            eps_min: 0.005,
            steps: 20,
            spacing: Spacing::Geometric,
        }
    }
}

impl EpsSchedule {
    /// Strictly decreasing values from `eps_max` to `eps_min`.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.eps_max];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let s = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.eps_max + s * (self.eps_min - self.eps_max),
                    Spacing::Geometric => self.eps_max * (self.eps_min / self.eps_max).powf(s),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    pub groundstate_csv: PathBuf,
    pub branch_json: PathBuf,
    pub charge_curve_csv: PathBuf,
    pub profile_csv: PathBuf,
    pub profiles_dir: Option<PathBuf>,
}

impl Default for OutputPaths {
    fn default() -> Self {
        Self {
            groundstate_csv: "groundstate.csv".into(),
            branch_json: "branch.json".into(),
            charge_curve_csv: "charge_curve.csv".into(),
            profile_csv: "profile.csv".into(),
            profiles_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub n: usize,
    pub k: f64,
    pub m: f64,
    pub terms: Vec<PowerTerm>,
    pub grid: GridConfig,
    pub eps_schedule: EpsSchedule,
    pub gamma: f64,
    pub output: OutputPaths,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 1,
            k: 1.0,
            m: 1.0,
            terms: Vec::new(),
            grid: GridConfig::default(),
            eps_schedule: EpsSchedule::default(),
            gamma: 0.1,
            output: OutputPaths::default(),
        }
    }
}

fn invalid(what: impl Into<String>) -> Failure {
    Failure::Invalid(what.into())
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| invalid(format!("config {}: {e}", path.display())))
    }

    pub fn nonlinearity(&self) -> Result<Nonlinearity, Failure> {
        Ok(Nonlinearity::new(self.k, self.terms.clone())?)
    }

    pub fn grid(&self) -> Result<Grid, Failure> {
        Ok(Grid::new(self.grid.t_max, self.grid.n_points, self.n)?)
    }

    /// Model and grid constraints shared by every command.
    pub fn validate_model(&self) -> Result<(), Failure> {
        if self.n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(invalid(format!("k = {} must be positive", self.k)));
        }
        validate_exponent(self.n, self.k)?;
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(invalid(format!("m = {} must be positive", self.m)));
        }
        self.nonlinearity()?;
        self.grid()?;
        Ok(())
    }

    /// Adds the continuation constraints: `0 < eps_min <= eps_max < m`, `gamma >= 0`.
    pub fn validate_branch(&self) -> Result<(), Failure> {
        self.validate_model()?;
        let s = &self.eps_schedule;
        if s.steps == 0 {
            return Err(invalid("eps_schedule.steps must be at least 1"));
        }
        if !(s.eps_min.is_finite() && s.eps_min > 0.0) {
            return Err(invalid(format!("eps_min = {} must be positive", s.eps_min)));
        }
        if s.eps_min > s.eps_max {
            return Err(invalid(format!(
                "eps_min = {} exceeds eps_max = {}",
                s.eps_min, s.eps_max
            )));
        }
        if s.steps > 1 && s.eps_min == s.eps_max {
            return Err(invalid("eps_min = eps_max requires steps = 1"));
        }
        if s.eps_max >= self.m {
            return Err(invalid(format!(
                "eps_max = {} must be below m = {}",
                s.eps_max, self.m
            )));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(invalid(format!(
                "gamma = {} must be non-negative",
                self.gamma
            )));
        }
        if !(self.gamma * self.grid.t_max).exp().is_finite() {
            return Err(invalid(format!(
                "gamma * t_max = {} overflows the weight",
                self.gamma * self.grid.t_max
            )));
        }
        Ok(())
    }
}

fn parse_term(s: &str) -> Result<PowerTerm, String> {
    let (c, k) = s
        .split_once(':')
        .ok_or_else(|| format!("'{s}' is not of the form c:K"))?;
    let coefficient = c
        .trim()
        .parse()
        .map_err(|e| format!("coefficient '{c}': {e}"))?;
    let exponent = k
        .trim()
        .parse()
        .map_err(|e| format!("exponent '{k}': {e}"))?;
    Ok(PowerTerm {
        coefficient,
        exponent,
    })
}

/// Model flags; any flag given overrides the value from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Spatial dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Leading exponent of f.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    /// Perturbation term `c:K` adding c|tau|^K; repeat for several. Replaces the configured terms.
    #[arg(long = "term", value_parser = parse_term)]
    pub terms: Vec<PowerTerm>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub n_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScheduleArgs {
    #[arg(long)]
    pub eps_max: Option<f64>,
    #[arg(long)]
    pub eps_min: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    /// Exponential weight for the correction norm.
    #[arg(long)]
    pub gamma: Option<f64>,
}

impl ModelArgs {
    pub fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(m) = self.m {
            cfg.m = m;
        }
        if !self.terms.is_empty() {
            cfg.terms = self.terms.clone();
        }
        if let Some(t) = self.t_max {
            cfg.grid.t_max = t;
        }
        if let Some(p) = self.n_points {
            cfg.grid.n_points = p;
        }
        Ok(cfg)
    }
}

impl ScheduleArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        let s = &mut cfg.eps_schedule;
        if let Some(v) = self.eps_max {
            s.eps_max = v;
        }
        if let Some(v) = self.eps_min {
            s.eps_min = v;
        }
        if let Some(v) = self.steps {
            s.steps = v;
        }
        if let Some(v) = self.spacing {
            s.spacing = v;
        }
        if let Some(g) = self.gamma {
            cfg.gamma = g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_hit_both_ends() {
        let mut s = EpsSchedule {
            eps_max: 0.1,
            eps_min: 0.005,
            steps: 20,
            spacing: Spacing::Geometric,
        };
        let v = s.values();
        assert_eq!(v.len(), 20);
        assert_eq!(v[0], 0.1);
        assert!((v[19] - 0.005).abs() < 1e-15);
        assert!(v.windows(2).all(|w| w[1] < w[0]));
        s.spacing = Spacing::Linear;
        let v = s.values();
        assert!((v[1] - (0.1 - 0.095 / 19.0)).abs() < 1e-15);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = serde_json::from_str::<RunConfig>(r#"{"n": 1, "mass": 2}"#).unwrap_err();
        assert!(err.to_string().contains("mass"));
        let cfg: RunConfig = serde_json::from_str(r#"{"grid": {"t_max": 20}}"#).unwrap();
        assert_eq!(cfg.grid.n_points, 3001);
        assert_eq!(cfg.grid.t_max, 20.0);
    }

    #[test]
    fn branch_constraints() {
        let mut cfg = RunConfig::default();
        assert!(cfg.validate_branch().is_ok());
        cfg.eps_schedule.eps_min = 0.2;
        assert!(matches!(cfg.validate_branch(), Err(Failure::Invalid(m)) if m.contains("exceeds")));
        let cfg = RunConfig {
            n: 3,
            k: 2.0,
            ..RunConfig::default()
        };
        assert!(matches!(cfg.validate_model(), Err(Failure::Invalid(m)) if m.contains("2/(n-2)")));
    }

    #[test]
    fn term_syntax() {
        assert_eq!(
            parse_term("0.5:1.5").unwrap(),
            PowerTerm {
                coefficient: 0.5,
                exponent: 1.5
            }
        );
        assert!(parse_term("0.5").is_err());
    }
}
