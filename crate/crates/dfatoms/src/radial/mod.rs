//! Radial discretization substrate: grids, nuclear potentials, channel
//! Hamiltonians, Coulomb multipole kernels and angular coefficients.

pub mod angular;
pub mod coulomb;
pub mod grid;
pub mod nuclear;
pub mod operator;
pub mod space;

pub use angular::{angular_weight, exchange_coefficient, intra_shell_weight, multipoles, wigner_3j, AngularCoefficient};
pub use coulomb::{apply_kernel, kernel_matrix, slater_integral, slater_y};
pub use grid::{build_grid, GridKind, RadialGrid};
pub use nuclear::{nuclear_potential, NuclearModel, NuclearShape};
pub use operator::{
    apply_factor, diagonalize_channel, dirac_channel_matrix, factor_matrix, kinetic_matrix, lowest_states,
    occupation_window, schrodinger_channel_matrix, ChannelOperator, ChannelSpectrum, ExchangeTerm,
    OperatorKind,
};
pub use space::{Channel, ChannelSpace, Layout};
