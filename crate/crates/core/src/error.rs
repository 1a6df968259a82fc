use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid exponent: k = {k} must satisfy k < 2/(n-2) = {limit} in dimension n = {n}")]
    InvalidExponent { n: usize, k: f64, limit: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("window [{lo}, {hi}] outside grid [0, {t_max}] or below underflow")]
    Window { lo: f64, hi: f64, t_max: f64 },

    #[error("weight overflow: exp({exponent}) is not finite")]
    Overflow { exponent: f64 },

    #[error("singular matrix at pivot {0}")]
    Singular(usize),

    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },

    #[error("bracket failure: {0}")]
    Bracket(String),

    #[error("positivity lost: V^2 - eps^2 U^2 <= 0 at t = {t}")]
    PositivityLost { t: f64 },

    #[error("too few points: need {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("stale profile: stationary residual {residual:e} exceeds {threshold:e}")]
    StaleProfile { residual: f64, threshold: f64 },

    #[error("out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
