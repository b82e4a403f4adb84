//! Spectral projectors of channel operators and the negative-energy residual
//! of occupied orbitals.

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use super::config::Configuration;
use super::mean_field::{mean_field_from_density, DensityOperator};
use crate::error::{Error, Result};
use crate::linalg::dense::{matmul, sym_eigen};
use crate::radial::{Channel, ChannelOperator};

/// Above this dimension the negative-side residual is bounded instead of
/// computed from a full eigendecomposition.
pub const DENSE_LIMIT: usize = 2400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectorSource {
    Free,
    MeanField,
    File,
}

/// Orthogonal projector on one channel space, kept both as a matrix and as an
/// orthonormal basis of its range.
#[derive(Clone, Debug)]
pub struct Projector {
    pub channel: Channel,
    pub matrix: Array2<f64>,
    pub basis: Array2<f64>,
    pub rank: usize,
    pub source: ProjectorSource,
}

impl Projector {
    /// Projector onto the span of orthonormal `basis` columns.
    pub fn from_basis(channel: Channel, basis: Array2<f64>, source: ProjectorSource) -> Self {
        let matrix = matmul(basis.view(), basis.t());
        let rank = basis.ncols();
        Self {
            channel,
            matrix,
            basis,
            rank,
            source,
        }
    }

    /// Builds a projector from a symmetric idempotent matrix, recovering the
    /// range basis from its eigenvectors.
    pub fn from_matrix(channel: Channel, matrix: Array2<f64>, source: ProjectorSource) -> Result<Self> {
        let (vals, vecs) = sym_eigen(&matrix)?;
        let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.5).collect();
        let basis = vecs.select(Axis(1), &keep);
        let p = Self {
            channel,
            rank: keep.len(),
            matrix,
            basis,
            source,
        };
        let idem = p.idempotency_error();
        if idem > 1e-8 {
            return Err(Error::InvalidInput(format!("matrix is not a projector (‖P²-P‖ = {idem:e})")));
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `1 - P`.
    pub fn complement(&self) -> Result<Projector> {
        let n = self.dim();
        let mut m = -&self.matrix;
        for i in 0..n {
            m[[i, i]] += 1.0;
        }
        Projector::from_matrix(self.channel, m, self.source)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let c = self.basis.t().dot(&Array1::from(x.to_vec()));
        self.basis.dot(&c).to_vec()
    }

    /// `‖P² - P‖_max`.
    pub fn idempotency_error(&self) -> f64 {
        let p2 = self.matrix.dot(&self.matrix);
        (&p2 - &self.matrix).iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `‖Pᵀ - P‖_max`.
    pub fn symmetry_error(&self) -> f64 {
        (&self.matrix - &self.matrix.t()).iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diag().sum()
    }
}

/// Collision tolerance around a spectral threshold.
pub fn collision_tolerance(op: &ChannelOperator) -> f64 {
    match op.c() {
        Some(c) if op.kind().is_dirac() => 1e-6 * c * c,
        _ => 1e-6,
    }
}

/// Projector onto eigenvectors with (physical) eigenvalue `≥ threshold`.
pub fn spectral_projector(op: &ChannelOperator, threshold: f64) -> Result<Projector> {
    spectral_split(op, threshold).map(|(p, _)| p)
}

/// Positive and negative spectral projectors at `threshold` from one
/// diagonalization; the two bases together are the full eigenbasis.
pub fn spectral_split(op: &ChannelOperator, threshold: f64) -> Result<(Projector, Projector)> {
    let (vals, vecs) = sym_eigen(&op.shifted_matrix())?;
    let t = threshold - op.shift();
    let tol = collision_tolerance(op);
    if let Some(v) = vals.iter().find(|v| (**v - t).abs() < tol) {
        return Err(Error::ThresholdCollision {
            threshold,
            eigenvalue: v + op.shift(),
            tolerance: tol,
        });
    }
    let (above, below): (Vec<usize>, Vec<usize>) = (0..vals.len()).partition(|&i| vals[i] >= t);
    Ok((
        Projector::from_basis(op.channel(), vecs.select(Axis(1), &above), ProjectorSource::MeanField),
        Projector::from_basis(op.channel(), vecs.select(Axis(1), &below), ProjectorSource::MeanField),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualMethod {
    /// Expansion in the full eigenbasis of the mean-field operator.
    Spectral,
    /// `‖(F - ε)ψ‖ / (ε - λ⁻_max)` with `λ⁻_max` from the local part, which
    /// bounds the top of the negative spectrum because exchange is negative
    /// semidefinite.
    ResidualBound,
    /// Schrödinger configurations have no negative-energy continuum.
    NotApplicable,
}

pub fn lambda_minus_residual(psi: &Configuration) -> Result<Vec<f64>> {
    lambda_minus_residual_with_method(psi).map(|(r, _)| r)
}

pub fn lambda_minus_residual_with_method(psi: &Configuration) -> Result<(Vec<f64>, ResidualMethod)> {
    if psi.problem.hamiltonian.c().is_none() {
        return Ok((vec![0.0; psi.shells.len()], ResidualMethod::NotApplicable));
    }
    let method = if psi.space().dim() <= DENSE_LIMIT {
        ResidualMethod::Spectral
    } else {
        ResidualMethod::ResidualBound
    };
    lambda_minus_residual_by(psi, method).map(|r| (r, method))
}

pub fn lambda_minus_residual_by(psi: &Configuration, method: ResidualMethod) -> Result<Vec<f64>> {
    let gamma = DensityOperator::from_configuration(psi);
    let mut out = vec![0.0; psi.shells.len()];
    if method == ResidualMethod::NotApplicable || psi.problem.hamiltonian.c().is_none() {
        return Ok(out);
    }
    for ch in psi.problem.occupied_channels() {
        let op = mean_field_from_density(&psi.problem, &gamma, ch)?;
        let members: Vec<usize> = (0..psi.shells.len()).filter(|&i| psi.shells[i].channel == ch).collect();
        match method {
            ResidualMethod::Spectral => {
                let (vals, vecs) = sym_eigen(&op.shifted_matrix())?;
                let neg: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] < -op.shift()).collect();
                let vneg = vecs.select(Axis(1), &neg);
                for &i in &members {
                    let c = vneg.t().dot(&Array1::from(psi.shells[i].coords.clone()));
                    out[i] = c.dot(&c).sqrt();
                }
            }
            ResidualMethod::ResidualBound => {
                let local = op.local().ok_or_else(|| Error::InvalidInput("mean field without local part".into()))?;
                let below = local.count_below(-op.shift());
                let top = if below == 0 {
                    f64::NEG_INFINITY
                } else {
                    let (lo, _) = local.bounds();
                    local.eigenvalue_in(below - 1, lo, -op.shift())
                };
                for &i in &members {
                    let x = &psi.shells[i].coords;
                    let mut fx = vec![0.0; x.len()];
                    op.apply_shifted(x, &mut fx);
                    let eps: f64 = fx.iter().zip(x).map(|(a, b)| a * b).sum();
                    let r = fx.iter().zip(x).map(|(a, b)| (a - eps * b).powi(2)).sum::<f64>().sqrt();
                    out[i] = if eps > top { (r / (eps - top)).min(1.0) } else { 1.0 };
                }
            }
            ResidualMethod::NotApplicable => {}
        }
    }
    Ok(out)
}
