//! Discrete versions of the `X` and weighted `X^1` norms on the parity-extended line.

use super::grid::{quadrature, GridFunction};
use crate::error::{Error, Result};

/// Largest exponent accepted by `exp` before the result stops being finite.
const EXP_LIMIT: f64 = 709.0;

/// `||g||_{L^2(|t|^{n-1} dt)} + ||g||_{L^inf}` with the normalizing constant set to 1.
pub fn norm_x(g: &GridFunction) -> f64 {
    let sq: Vec<f64> = g.values().iter().map(|v| v * v).collect();
    quadrature::line_integral(g.grid(), &sq).sqrt() + g.max_abs()
}

/// `X` norm of a pair, `sqrt(||a||_X^2 + ||b||_X^2)`.
pub fn norm_x_pair(a: &GridFunction, b: &GridFunction) -> f64 {
    norm_x(a).hypot(norm_x(b))
}

/// `H^1(R, <t>^{n-1} dt)` norm of `e^{gamma <t>} g`.
///
/// The derivative is the fourth-order centered stencil applied to the weighted samples.
pub fn norm_x1_weighted(g: &GridFunction, gamma: f64) -> Result<f64> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma = {gamma} must be non-negative"
        )));
    }
    let grid = *g.grid();
    let exponent = gamma * bracket(grid.t_max());
    if exponent > EXP_LIMIT {
        return Err(Error::Overflow { exponent });
    }
    let weighted: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(g.values())
        .map(|(&t, &v)| (gamma * bracket(t)).exp() * v)
        .collect();
    let w = GridFunction::new(grid, weighted, g.parity())?;
    let dw = w.derivative();
    // <t>^{n-1} replaces |t|^{n-1}, so the line weights are rebuilt from dt alone.
    let flat = grid.with_dim(1)?;
    let p = grid.dim() as i32 - 1;
    let integrand: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(w.values().iter().zip(dw.values()))
        .map(|(&t, (a, b))| (a * a + b * b) * bracket(t).powi(p))
        .collect();
    let value = quadrature::line_integral(&flat, &integrand).sqrt();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow { exponent })
    }
}

pub fn norm_x1_weighted_pair(a: &GridFunction, b: &GridFunction, gamma: f64) -> Result<f64> {
    Ok(norm_x1_weighted(a, gamma)?.hypot(norm_x1_weighted(b, gamma)?))
}

/// Japanese bracket `<t> = sqrt(1 + t^2)`.
pub fn bracket(t: f64) -> f64 {
    (1.0 + t * t).sqrt()
}
