pub mod grid;
pub mod inequalities;
pub mod nonlinearity;
pub mod norms;
pub mod profile;

pub use grid::{Grid, GridFunction, Parity};
pub use nonlinearity::{Nonlinearity, PowerTerm};
pub use norms::{norm_x, norm_x1_weighted, norm_x1_weighted_pair, norm_x_pair};
pub use profile::{Branch, BranchPoint, DiracProfile, HatPair};
