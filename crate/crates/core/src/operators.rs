//! Discretized `A(eps)` and the radial linearizations `l_+`, `l_-`.
//!
//! Derivatives use the fourth-order centered stencils with parity ghosts at the origin and
//! zero extension past `t_max`. `A(eps)` interleaves the unknowns as `(V_0, U_0, V_1, U_1, ...)`.

use crate::banded::{BandLu, BandMatrix};
use crate::error::{Error, Result};
use crate::groundstate::GroundstateProfile;
use crate::model::grid::{stencil, Grid, GridFunction, Parity};
use crate::model::profile::{omega_of, HatPair};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    Dirac { eps: f64, omega: f64 },
    LPlus,
    LMinus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    pub grid: Grid,
    pub kind: OperatorKind,
    pub matrix: BandMatrix,
}

impl BandedOperator {
    pub fn factorize(&self) -> Result<FactorizedOperator> {
        Ok(FactorizedOperator {
            op: self.clone(),
            lu: self.matrix.factorize()?,
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scaled(factor),
            ..self.clone()
        }
    }

    /// `A (v, u)` for the block operator.
    pub fn apply_pair(
        &self,
        v: &GridFunction,
        u: &GridFunction,
    ) -> Result<(GridFunction, GridFunction)> {
        self.expect_dirac()?;
        let y = self.matrix.matvec(&interleave(&self.grid, v, u)?);
        split(&self.grid, &y)
    }

    /// `l_pm g` for the scalar operators.
    pub fn apply_scalar(&self, g: &[f64]) -> Result<Vec<f64>> {
        if matches!(self.kind, OperatorKind::Dirac { .. }) {
            return Err(Error::InvalidParameter(
                "apply_scalar on the block operator".into(),
            ));
        }
        if g.len() != self.grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "{} samples for {} nodes",
                g.len(),
                self.grid.n_points()
            )));
        }
        Ok(self.matrix.matvec(g))
    }

    fn expect_dirac(&self) -> Result<()> {
        match self.kind {
            OperatorKind::Dirac { .. } => Ok(()),
            _ => Err(Error::InvalidParameter(
                "expected the block operator A(eps)".into(),
            )),
        }
    }
}

/// Operator together with its LU factors; immutable and shareable.
#[derive(Debug, Clone)]
pub struct FactorizedOperator {
    pub op: BandedOperator,
    lu: BandLu,
}

impl FactorizedOperator {
    pub fn solve_pair(
        &self,
        rhs_v: &GridFunction,
        rhs_u: &GridFunction,
    ) -> Result<(GridFunction, GridFunction)> {
        self.op.expect_dirac()?;
        if rhs_v.parity() != Parity::Even || rhs_u.parity() != Parity::Odd {
            return Err(Error::InvalidParameter(
                "right-hand side must be (even, odd)".into(),
            ));
        }
        let x = self.lu.solve(&interleave(&self.op.grid, rhs_v, rhs_u)?);
        split(&self.op.grid, &x)
    }

    pub fn solve_scalar(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.lu.size() {
            return Err(Error::GridMismatch("right-hand side length".into()));
        }
        Ok(self.lu.solve(rhs))
    }

    pub fn lu(&self) -> &BandLu {
        &self.lu
    }
}

fn interleave(grid: &Grid, v: &GridFunction, u: &GridFunction) -> Result<Vec<f64>> {
    grid.ensure_same(v.grid(), "V component")?;
    grid.ensure_same(u.grid(), "U component")?;
    Ok(v.values()
        .iter()
        .zip(u.values())
        .flat_map(|(&a, &b)| [a, b])
        .collect())
}

fn split(grid: &Grid, x: &[f64]) -> Result<(GridFunction, GridFunction)> {
    let v = x.iter().step_by(2).copied().collect();
    let u = x.iter().skip(1).step_by(2).copied().collect();
    Ok((
        GridFunction::new(*grid, v, Parity::Even)?,
        GridFunction::new(*grid, u, Parity::Odd)?,
    ))
}

/// Adds `scale * (first derivative of the component with this parity)` to row `row`.
fn add_first_derivative(
    mat: &mut BandMatrix,
    row: usize,
    i: usize,
    n: usize,
    parity: Parity,
    scale: f64,
    column: impl Fn(usize) -> usize,
) {
    for &(off, c) in stencil::FIRST.iter() {
        if let Some((j, s)) = stencil::ghost(i as isize + off, n, parity) {
            mat.add(row, column(j), scale * c * s);
        }
    }
}

/// `A(eps) = [[-1/(m+w) + (1+2k) vhat^{2k}, -d_t - (n-1)/t], [d_t, m+w]]`.
///
/// The `(n-1)U/t` entry at `t = 0` becomes `(n-1)U'(0)`. Boundary rows: `U(0) = 0` and
/// Dirichlet values for both components at `t_max`; those unknowns are decoupled from the
/// interior rows.
pub fn assemble_a(eps: f64, hat: &HatPair, grid: &Grid) -> Result<BandedOperator> {
    grid.ensure_same(hat.grid(), "assemble_a")?;
    let m = hat.m;
    if !(eps >= 0.0 && eps < m) {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} must lie in [0, m = {m})"
        )));
    }
    let omega = if eps == 0.0 { m } else { omega_of(eps, m) };
    let n = grid.n_points();
    let dim = grid.dim() as f64;
    let h = grid.step();
    let k = hat.k;
    let mut mat = BandMatrix::zeros(2 * n, 5, 5);
    let vcol = |j: usize| 2 * j;
    let ucol = |j: usize| 2 * j + 1;
    for i in 0..n {
        let (rv, ru) = (2 * i, 2 * i + 1);
        if i + 1 == n {
            mat.set(rv, rv, 1.0);
            mat.set(ru, ru, 1.0);
            continue;
        }
        let vh = hat.vhat.values()[i];
        mat.add(
            rv,
            vcol(i),
            -1.0 / (m + omega) + (1.0 + 2.0 * k) * vh.abs().powf(2.0 * k),
        );
        if i == 0 {
            add_first_derivative(&mut mat, rv, i, n, Parity::Odd, -dim / h, ucol);
            mat.set(ru, ru, 1.0);
        } else {
            add_first_derivative(&mut mat, rv, i, n, Parity::Odd, -1.0 / h, ucol);
            mat.add(rv, ucol(i), -(dim - 1.0) / grid.node(i));
            add_first_derivative(&mut mat, ru, i, n, Parity::Even, 1.0 / h, vcol);
            mat.add(ru, ucol(i), m + omega);
        }
    }
    for j in [ucol(0), vcol(n - 1), ucol(n - 1)] {
        mat.isolate(j);
    }
    Ok(BandedOperator {
        grid: *grid,
        kind: OperatorKind::Dirac { eps, omega },
        matrix: mat,
    })
}

/// Solves `A w = rhs`; boundary rows take their values from `rhs`.
pub fn solve_a(
    op: &BandedOperator,
    rhs_v: &GridFunction,
    rhs_u: &GridFunction,
) -> Result<(GridFunction, GridFunction)> {
    op.factorize()?.solve_pair(rhs_v, rhs_u)
}

fn assemble_l(gs: &GroundstateProfile, coupling: f64, kind: OperatorKind) -> BandedOperator {
    let grid = gs.grid;
    let n = grid.n_points();
    let dim = gs.n as f64;
    let h = grid.step();
    let inv2m = 1.0 / (2.0 * gs.m);
    let mut mat = BandMatrix::zeros(n, 2, 2);
    for i in 0..n {
        if i + 1 == n {
            mat.set(i, i, 1.0);
            continue;
        }
        // -Delta/(2m): n u''(0) at the origin, u'' + (n-1)u'/r elsewhere.
        let d2_scale = if i == 0 { dim } else { 1.0 };
        for &(off, c) in stencil::SECOND.iter() {
            if let Some((j, s)) = stencil::ghost(i as isize + off, n, Parity::Even) {
                mat.add(i, j, -inv2m * d2_scale * c * s / (h * h));
            }
        }
        if i > 0 {
            add_first_derivative(
                &mut mat,
                i,
                i,
                n,
                Parity::Even,
                -inv2m * (dim - 1.0) / (grid.node(i) * h),
                |j| j,
            );
        }
        mat.add(i, i, inv2m - coupling * gs.u[i].abs().powf(2.0 * gs.k));
    }
    mat.isolate(n - 1);
    BandedOperator {
        grid,
        kind,
        matrix: mat,
    }
}

/// `l_+ = 1/(2m) - Delta/(2m) - (1+2k) u_k^{2k}` on radial functions.
pub fn assemble_l_plus(gs: &GroundstateProfile) -> BandedOperator {
    assemble_l(gs, 1.0 + 2.0 * gs.k, OperatorKind::LPlus)
}

/// `l_- = 1/(2m) - Delta/(2m) - u_k^{2k}` on radial functions.
pub fn assemble_l_minus(gs: &GroundstateProfile) -> BandedOperator {
    assemble_l(gs, 1.0, OperatorKind::LMinus)
}

/// Smallest singular value by inverse iteration on `A^T A`.
pub fn min_singular_value(op: &BandedOperator) -> Result<f64> {
    min_singular_value_with(op, 2000, 1e-10)
}

pub fn min_singular_value_with(
    op: &BandedOperator,
    max_iterations: usize,
    tol: f64,
) -> Result<f64> {
    let lu = op.matrix.factorize()?;
    let size = op.matrix.size();
    // Deterministic start with components in every direction.
    let mut x: Vec<f64> = (0..size)
        .map(|i| 1.0 + 0.5 * ((i as f64) * 0.7).sin())
        .collect();
    normalize(&mut x);
    let mut previous = f64::INFINITY;
    let mut change = f64::INFINITY;
    for _ in 0..max_iterations {
        let y = lu.solve_transpose(&x);
        let rayleigh: f64 = y.iter().map(|v| v * v).sum();
        x = lu.solve(&y);
        normalize(&mut x);
        change = ((rayleigh - previous) / rayleigh).abs();
        if change < tol {
            return Ok(1.0 / rayleigh.sqrt());
        }
        previous = rayleigh;
    }
    Err(Error::NoConvergence {
        iterations: max_iterations,
        last_change: change,
    })
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
}

/// `gamma_0 = (1/(1+2k)) / (1 + sup ||A(eps)^{-1}||)`.
pub fn gamma0_estimate(norm_ainv_sup: f64, k: f64) -> f64 {
    (1.0 / (1.0 + 2.0 * k)) / (1.0 + norm_ainv_sup)
}

/// `(1/k) vhat + t vhat'` and `-(1/(2m)) d_t` of it, built from the groundstate samples.
pub fn scaling_generator(gs: &GroundstateProfile) -> Result<(GridFunction, GridFunction)> {
    let grid = gs.grid;
    let ddu = gs.second_derivative();
    let w: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(gs.u.iter().zip(&gs.du))
        .map(|(&t, (&u, &du))| u / gs.k + t * du)
        .collect();
    // d_t((1/k)u + t u') = (1/k + 1) u' + t u''
    let dw: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(gs.du.iter().zip(&ddu))
        .map(|(&t, (&du, &dd))| -((1.0 / gs.k + 1.0) * du + t * dd) / (2.0 * gs.m))
        .collect();
    Ok((
        GridFunction::new(grid, w, Parity::Even)?,
        GridFunction::new(grid, dw, Parity::Odd)?,
    ))
}
