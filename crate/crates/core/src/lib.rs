//! Numerical solitary waves of the nonlinear Dirac equation with scalar self-interaction in the
//! nonrelativistic limit, built from the groundstate of the nonlinear Schrodinger equation.

pub mod analysis;
pub mod banded;
pub mod dirac;
pub mod error;
pub mod groundstate;
pub mod model;
pub mod ode;
pub mod operators;
pub mod verify;

pub use error::{Error, Result};
