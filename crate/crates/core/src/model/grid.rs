use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on `[0, t_max]`, read as the half line of a parity-extended function on
/// `[-t_max, t_max]`, or as the radial coordinate of `R^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    t_max: f64,
    n_points: usize,
    dim: usize,
}

impl Grid {
    pub fn new(t_max: f64, n_points: usize, dim: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_max = {t_max} must be positive"
            )));
        }
        if n_points < 3 {
            return Err(Error::InvalidParameter(format!(
                "n_points = {n_points} must be at least 3"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            ));
        }
        Ok(Self {
            t_max,
            n_points,
            dim,
        })
    }

    /// Grid with spacing `step` (rounded so that `t_max` is a node).
    pub fn with_step(t_max: f64, step: f64, dim: usize) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step = {step} must be positive"
            )));
        }
        let intervals = (t_max / step).round() as usize;
        Self::new(t_max, intervals + 1, dim)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> f64 {
        self.t_max / (self.n_points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.t_max
        } else {
            i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    /// Same discretization of the line in another spatial dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        Self::new(self.t_max, self.n_points, dim)
    }

    pub fn ensure_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: ({}, {}, n={}) vs ({}, {}, n={})",
                self.t_max, self.n_points, self.dim, other.t_max, other.n_points, other.dim
            )))
        }
    }

    /// Index of the last node with `t <= value`.
    pub fn index_at_or_below(&self, value: f64) -> usize {
        let raw = (value / self.step()).floor();
        if raw <= 0.0 {
            0
        } else {
            (raw as usize).min(self.n_points - 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Samples on the nodes of a [`Grid`] with a declared parity under `t -> -t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
    parity: Parity,
}

impl GridFunction {
    /// Odd functions have their value at `t = 0` forced to zero.
    pub fn new(grid: Grid, mut values: Vec<f64>, parity: Parity) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.n_points()
            )));
        }
        if parity == Parity::Odd {
            values[0] = 0.0;
        }
        Ok(Self {
            grid,
            values,
            parity,
        })
    }

    pub fn zeros(grid: Grid, parity: Parity) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n_points()],
            parity,
        }
    }

    pub fn from_fn(grid: Grid, parity: Parity, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, values, parity).expect("length matches by construction")
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(
            self.grid,
            self.values.iter().map(|&v| f(v)).collect(),
            self.parity,
        )
        .expect("same grid")
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid, "zip_with")?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.grid, values, self.parity)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Fourth-order centered first derivative; the result has the opposite parity.
    pub fn derivative(&self) -> GridFunction {
        let values = stencil::first_derivative(&self.values, self.parity, self.grid.step());
        GridFunction::new(self.grid, values, self.parity.flip()).expect("same grid")
    }

    /// Linear interpolation at `t >= 0`; beyond `t_max` is an error.
    pub fn interpolate(&self, t: f64) -> Result<f64> {
        let t_abs = t.abs();
        if t_abs > self.grid.t_max() * (1.0 + 1e-12) {
            return Err(Error::OutOfRange(format!(
                "t = {t} outside [-{0}, {0}]",
                self.grid.t_max()
            )));
        }
        let h = self.grid.step();
        let i = ((t_abs / h).floor() as usize).min(self.grid.n_points() - 2);
        let frac = (t_abs - i as f64 * h) / h;
        let v = self.values[i] * (1.0 - frac) + self.values[i + 1] * frac;
        Ok(if t < 0.0 { self.parity.sign() * v } else { v })
    }
}

/// Quadrature over the parity-extended line or over `R^n` in polar coordinates.
pub mod quadrature {
    use super::Grid;

    /// Composite trapezoid weights on `[0, t_max]` times `t^{dim-1}`.
    ///
    /// Doubling these gives the folded trapezoid rule on `[-t_max, t_max]` with `|t|^{dim-1}`.
    pub fn half_line_weights(grid: &Grid) -> Vec<f64> {
        let h = grid.step();
        let p = grid.dim() as i32 - 1;
        (0..grid.n_points())
            .map(|i| {
                let t = grid.node(i);
                let end = if i == 0 || i + 1 == grid.n_points() {
                    0.5
                } else {
                    1.0
                };
                end * h * t.powi(p)
            })
            .collect()
    }

    /// `int_{-t_max}^{t_max} g(t) |t|^{dim-1} dt` for an even integrand sampled on the half line.
    pub fn line_integral(grid: &Grid, integrand: &[f64]) -> f64 {
        2.0 * half_line_weights(grid)
            .iter()
            .zip(integrand)
            .map(|(w, g)| w * g)
            .sum::<f64>()
    }

    /// Surface area of the unit sphere in `R^n`; `vol(S^0) = 2`.
    pub fn sphere_area(n: usize) -> f64 {
        2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
    }

    /// `Gamma(n / 2)` for a positive integer `n`.
    fn gamma_half_integer(n: usize) -> f64 {
        let mut x = if n.is_multiple_of(2) { 1.0 } else { 0.5 };
        let mut g = if n.is_multiple_of(2) {
            1.0
        } else {
            std::f64::consts::PI.sqrt()
        };
        while x + 1e-9 < n as f64 / 2.0 {
            g *= x;
            x += 1.0;
        }
        g
    }

    /// `int_{R^n} g(|y|) dy` for a radial integrand sampled on the grid.
    pub fn radial_integral(grid: &Grid, integrand: &[f64]) -> f64 {
        sphere_area(grid.dim())
            * half_line_weights(grid)
                .iter()
                .zip(integrand)
                .map(|(w, g)| w * g)
                .sum::<f64>()
    }
}

/// Finite-difference stencils that use parity ghosts at `t = 0` and zero beyond `t_max`.
pub mod stencil {
    use super::Parity;

    pub const FIRST: [(isize, f64); 4] = [
        (-2, 1.0 / 12.0),
        (-1, -8.0 / 12.0),
        (1, 8.0 / 12.0),
        (2, -1.0 / 12.0),
    ];
    pub const SECOND: [(isize, f64); 5] = [
        (-2, -1.0 / 12.0),
        (-1, 16.0 / 12.0),
        (0, -30.0 / 12.0),
        (1, 16.0 / 12.0),
        (2, -1.0 / 12.0),
    ];

    /// Maps a possibly negative or overflowing neighbour index to `(index, sign)`;
    /// `None` means the zero extension past `t_max`.
    pub fn ghost(j: isize, n: usize, parity: Parity) -> Option<(usize, f64)> {
        if j < 0 {
            Some(((-j) as usize, parity.sign()))
        } else if (j as usize) < n {
            Some((j as usize, 1.0))
        } else {
            None
        }
    }

    fn apply(values: &[f64], parity: Parity, coeffs: &[(isize, f64)], scale: f64) -> Vec<f64> {
        let n = values.len();
        (0..n)
            .map(|i| {
                coeffs
                    .iter()
                    .filter_map(|&(off, c)| {
                        ghost(i as isize + off, n, parity).map(|(j, s)| c * s * values[j])
                    })
                    .sum::<f64>()
                    * scale
            })
            .collect()
    }

    pub fn first_derivative(values: &[f64], parity: Parity, h: f64) -> Vec<f64> {
        apply(values, parity, &FIRST, 1.0 / h)
    }

    pub fn second_derivative(values: &[f64], parity: Parity, h: f64) -> Vec<f64> {
        apply(values, parity, &SECOND, 1.0 / (h * h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_basics() {
        let g = Grid::new(10.0, 11, 1).unwrap();
        assert_eq!(g.step(), 1.0);
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(10), 10.0);
        assert!(Grid::new(10.0, 2, 1).is_err());
        assert!(Grid::new(-1.0, 10, 1).is_err());
        assert!(Grid::new(1.0, 10, 0).is_err());
        assert_eq!(Grid::with_step(30.0, 0.01, 1).unwrap().n_points(), 3001);
    }

    #[test]
    fn odd_functions_vanish_at_origin() {
        let g = Grid::new(1.0, 5, 1).unwrap();
        let f = GridFunction::new(g, vec![3.0, 1.0, 1.0, 1.0, 1.0], Parity::Odd).unwrap();
        assert_eq!(f.values()[0], 0.0);
    }

    #[test]
    fn derivative_is_fourth_order_with_parity() {
        let errs: Vec<f64> = [0.02, 0.01]
            .iter()
            .map(|&h| {
                let g = Grid::with_step(20.0, h, 1).unwrap();
                let f = GridFunction::from_fn(g, Parity::Even, |t| 1.0 / t.cosh());
                let d = f.derivative();
                assert_eq!(d.parity(), Parity::Odd);
                g.nodes()
                    .iter()
                    .zip(d.values())
                    .take(g.n_points() - 3)
                    .map(|(&t, &v)| (v + t.tanh() / t.cosh()).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        let ratio = errs[0] / errs[1];
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn sphere_areas() {
        use quadrature::sphere_area;
        use std::f64::consts::PI;
        assert!((sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn interpolation_respects_parity() {
        let g = Grid::new(2.0, 3, 1).unwrap();
        let f = GridFunction::new(g, vec![0.0, 1.0, 2.0], Parity::Odd).unwrap();
        assert_eq!(f.interpolate(0.5).unwrap(), 0.5);
        assert_eq!(f.interpolate(-1.5).unwrap(), -1.5);
        assert!(f.interpolate(2.5).is_err());
    }
}
