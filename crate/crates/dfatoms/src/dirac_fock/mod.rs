//! Closed-shell Dirac-Fock model: configurations, density, mean field, energy,
//! self-consistent solution and spectral diagnostics. The same machinery runs
//! the Hartree-Fock limit when the problem carries the Schrödinger operator.

mod config;
mod energy;
mod mean_field;
mod scf;
mod spectral;

pub use config::{
    check_supported, node_count, Configuration, ElectronicConfiguration, Hamiltonian, Problem, ScfControls, Shell,
    ShellSpec, SUPPORTED_DIRAC, SUPPORTED_SCHRODINGER,
};
pub use energy::{df_energy, EnergyBreakdown};
pub use mean_field::{
    mean_field_from_density, mean_field_matrix, orbital_residuals, radial_density, DensityOperator, DensityTerm,
    RadialDensity,
};
pub use scf::{initial_guess, scf_from, scf_solve, ScfReport, SCFReport};
pub use spectral::{
    collision_tolerance, lambda_minus_residual, lambda_minus_residual_by, lambda_minus_residual_with_method,
    spectral_projector, spectral_split, Projector, ProjectorSource, ResidualMethod, DENSE_LIMIT,
};

pub(crate) use scf::{aufbau, iterate};
