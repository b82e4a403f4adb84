//! Projector-based formulations: the free positive projector, closeness of a
//! projector to it, the projected Dirac-Fock equations and the min-max
//! characterization of the ground-state energy.

mod maxmin;
mod projected;

pub use maxmin::{maxmin_energy, MaxMinControls, MinMaxReport};
pub use projected::{projected_scf, PositiveProjectors, ProjectedScfReport};

use ndarray::{s, Array1, Array2};

use crate::dirac_fock::{Projector, ProjectorSource};
use crate::error::{Error, Result};
use crate::linalg::dense::{matmul, spectral_norm, svd};
use crate::radial::{factor_matrix, Channel, RadialGrid};

/// Spectral data of the free channel operator `[[c², cBᵀ], [cB, -c²]]` from
/// the SVD `B = U Σ Vᵀ`: the pair `(v_k, u_k)` spans a 2×2 block with
/// eigenvalues `±E_k`, `E_k = sqrt(c⁴ + c²σ_k²)`.
#[derive(Clone, Debug)]
pub struct FreeSpectrum {
    pub channel: Channel,
    pub c: f64,
    pub sigma: Array1<f64>,
    /// Right singular vectors, acting on large-component coordinates.
    pub v: Array2<f64>,
    /// Left singular vectors, acting on small-component coordinates.
    pub u: Array2<f64>,
}

impl FreeSpectrum {
    pub fn new(grid: &RadialGrid, kappa: i32, c: f64) -> Result<Self> {
        let channel = Channel::dirac(kappa)?;
        if !(c > 0.0) {
            return Err(Error::InvalidInput(format!("speed of light must be positive, got {c}")));
        }
        let (u, sigma, v) = svd(&factor_matrix(grid, kappa))?;
        Ok(Self { channel, c, sigma, v, u })
    }

    pub fn energies(&self) -> Array1<f64> {
        let c2 = self.c * self.c;
        self.sigma.mapv(|s| (c2 * c2 + c2 * s * s).sqrt())
    }

    /// Coefficients `(α_k, β_k)` of the positive eigenvector `(α v_k, β u_k)`;
    /// the negative one is `(-β v_k, α u_k)`.
    fn mixing(&self) -> Vec<(f64, f64)> {
        let c2 = self.c * self.c;
        self.sigma
            .iter()
            .zip(self.energies().iter())
            .map(|(&s, &e)| {
                let alpha = ((e + c2) / (2.0 * e)).sqrt();
                let beta = self.c * s / (2.0 * e * (e + c2)).sqrt();
                (alpha, beta)
            })
            .collect()
    }

    fn basis(&self, positive: bool) -> Array2<f64> {
        let m = self.sigma.len();
        let mut b = Array2::zeros((2 * m, m));
        for (k, (a, bt)) in self.mixing().into_iter().enumerate() {
            let (cp, cq) = if positive { (a, bt) } else { (-bt, a) };
            for i in 0..m {
                b[[2 * i, k]] = cp * self.v[[i, k]];
                b[[2 * i + 1, k]] = cq * self.u[[i, k]];
            }
        }
        b
    }

    pub fn positive(&self) -> Projector {
        Projector::from_basis(self.channel, self.basis(true), ProjectorSource::Free)
    }

    pub fn negative(&self) -> Projector {
        Projector::from_basis(self.channel, self.basis(false), ProjectorSource::Free)
    }

    /// Coordinates in the singular basis, ordered `[Vᵀ x_P ; Uᵀ x_Q]`.
    fn rotate(&self, x: &Array2<f64>) -> Array2<f64> {
        let m = self.sigma.len();
        let p = x.slice(s![0..2 * m;2, ..]);
        let q = x.slice(s![1..2 * m;2, ..]);
        let mut out = Array2::zeros((2 * m, x.ncols()));
        out.slice_mut(s![0..m, ..]).assign(&matmul(self.v.t(), p));
        out.slice_mut(s![m..2 * m, ..]).assign(&matmul(self.u.t(), q));
        out
    }
}

/// `Λ⁺_c`: the spectral projector of the free channel operator onto its
/// positive spectrum (rank M on the 2M-dimensional space).
pub fn free_positive_projector(kappa: i32, c: f64, grid: &RadialGrid) -> Result<Projector> {
    Ok(FreeSpectrum::new(grid, kappa, c)?.positive())
}

/// Smallest `ε` with `‖W (P - Λ⁺_c) W⁻¹‖ ≤ ε`, where `W = (c²K + c⁴)^{1/4}` and
/// `K` is the per-component kinetic matrix of the discretization.
pub fn epsilon_closeness(p: &Projector, kappa: i32, c: f64, grid: &RadialGrid) -> Result<f64> {
    let free = FreeSpectrum::new(grid, kappa, c)?;
    let m = free.sigma.len();
    if p.dim() != 2 * m {
        return Err(Error::Dimension(format!(
            "projector acts on {} coordinates, channel space has {}",
            p.dim(),
            2 * m
        )));
    }
    if p.channel != free.channel {
        return Err(Error::Dimension(format!("projector channel {} differs from {}", p.channel, free.channel)));
    }
    let smin = free.sigma.iter().fold(f64::INFINITY, |a, b| a.min(*b));
    if !(smin > 0.0) {
        return Err(Error::Domain("kinetic matrix is not positive definite".into()));
    }
    // everything in the singular basis, where W and Λ⁺ are 2×2 block diagonal
    let b = free.rotate(&p.basis);
    let mut d = matmul(b.view(), b.t());
    for (k, (a, bt)) in free.mixing().into_iter().enumerate() {
        d[[k, k]] -= a * a;
        d[[k, k + m]] -= a * bt;
        d[[k + m, k]] -= a * bt;
        d[[k + m, k + m]] -= bt * bt;
    }
    let g: Vec<f64> = free.energies().iter().map(|e| e.sqrt()).collect();
    for i in 0..2 * m {
        for j in 0..2 * m {
            d[[i, j]] *= g[i % m] / g[j % m];
        }
    }
    spectral_norm(d.view())
}

/// Largest principal angle between two subspaces given by orthonormal bases,
/// reported as its sine: `‖(1 - P_a) B_b‖₂` (symmetric for equal ranks).
pub fn subspace_distance(a: &Array2<f64>, b: &Array2<f64>) -> Result<f64> {
    if a.nrows() != b.nrows() {
        return Err(Error::Dimension("bases live in different spaces".into()));
    }
    if a.ncols() != b.ncols() {
        return Ok(1.0);
    }
    let overlap = matmul(a.t(), b.view());
    let rest = b - &matmul(a.view(), overlap.view());
    spectral_norm(rest.view())
}
