//! Numerical linear algebra used across the solvers.

pub mod davidson;
pub mod dense;
pub mod tridiag;

pub use davidson::{lowest_in_window, DavidsonOptions, Eigenpairs, SymOperator};
pub use tridiag::SymTridiagonal;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
