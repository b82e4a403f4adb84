//! Dirac-Fock and Hartree-Fock solvers for closed-shell atoms.
//!
//! The crate discretizes radial channels on an exponential grid, solves the
//! self-consistent Dirac-Fock equations and their nonrelativistic limit, and
//! provides projector-based diagnostics: spectral projectors of the mean-field
//! operator, closeness to the free positive projector, projected and min-max
//! variational formulations, and a density-matrix model constrained by a
//! positive-energy projector.
//!
//! Energies are in Hartree, lengths in Bohr, and `c` is a run parameter.

pub mod dirac_fock;
pub mod error;
pub mod fock_space;
pub mod io;
pub mod linalg;
pub mod nonrel;
pub mod projector;
pub mod radial;

pub use error::{Error, Result};

/// Speed of light in atomic units.
pub const SPEED_OF_LIGHT: f64 = 137.035999084;
