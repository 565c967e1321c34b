//! Matrices over p-adic algebras and characteristic series.

mod algebra;
mod charpoly;
mod matrix;

pub use algebra::Algebra;
pub use charpoly::{berkowitz, determinant, fredholm, fredholm_from_traces, fredholm_minors, power_traces};
pub use matrix::Matrix;
