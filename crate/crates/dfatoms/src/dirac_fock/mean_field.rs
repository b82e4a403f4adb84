//! Densities and the mean-field operator.

use ndarray::Array2;

use super::config::{check_supported, Configuration, Problem};
use crate::error::Result;
use crate::linalg::dense::sym_eigen;
use crate::radial::{apply_kernel, exchange_coefficient, multipoles, Channel, ChannelOperator, ExchangeTerm};

/// Radial density split by component: `Σ w P²` on the nodes and `Σ w Q²` on
/// the midpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialDensity {
    pub nodes: Vec<f64>,
    pub large: Vec<f64>,
    pub midpoints: Vec<f64>,
    pub small: Vec<f64>,
    h: f64,
}

impl RadialDensity {
    /// `∫ D dr` with the same quadrature as the orbital inner product.
    pub fn integral(&self) -> f64 {
        let a: f64 = self.nodes.iter().zip(&self.large).map(|(r, d)| r * d).sum();
        let b: f64 = self.midpoints.iter().zip(&self.small).map(|(r, d)| r * d).sum();
        self.h * (a + b)
    }

    /// `D(r_i)` on the nodes; the small-component part is interpolated from
    /// the neighbouring midpoints.
    pub fn at_nodes(&self) -> Vec<f64> {
        let m = self.nodes.len();
        (0..m)
            .map(|i| {
                let q2 = if i == 0 {
                    self.small[0]
                } else {
                    0.5 * (self.small[i - 1] + self.small[i])
                };
                self.large[i] + q2
            })
            .collect()
    }
}

pub fn radial_density(psi: &Configuration) -> RadialDensity {
    let space = psi.space();
    let grid = space.grid();
    let m = grid.len();
    let mut large = vec![0.0; m];
    let mut small = vec![0.0; m];
    for s in &psi.shells {
        let w = s.occupation as f64;
        let p = space.large(&s.coords);
        let q = space.small(&s.coords);
        for i in 0..m {
            large[i] += w * p[i] * p[i];
            small[i] += w * q[i] * q[i];
        }
    }
    RadialDensity {
        nodes: grid.nodes().to_vec(),
        large,
        midpoints: grid.midpoints(),
        small,
        h: grid.step(),
    }
}

/// One rank-one piece `weight · y yᵀ` of a channel density operator.
#[derive(Clone, Debug)]
pub struct DensityTerm {
    pub channel: Channel,
    pub weight: f64,
    pub vector: Vec<f64>,
}

/// Occupied-space density operator `Γ = Σ_κ Σ w y yᵀ`, the object the SCF
/// mixes between iterations.
#[derive(Clone, Debug, Default)]
pub struct DensityOperator {
    pub terms: Vec<DensityTerm>,
    /// One electron in one spin-orbital: its exchange cancels its own direct
    /// potential in full.
    pub single_electron: bool,
}

impl DensityOperator {
    pub fn from_configuration(psi: &Configuration) -> Self {
        Self {
            terms: psi
                .shells
                .iter()
                .map(|s| DensityTerm {
                    channel: s.channel,
                    weight: s.occupation as f64,
                    vector: s.coords.clone(),
                })
                .collect(),
            single_electron: psi.electron_count() == 1,
        }
    }

    /// Coordinate density `n_f = Σ w y_f²`.
    pub fn coordinate_density(&self, dim: usize) -> Vec<f64> {
        let mut n = vec![0.0; dim];
        for t in &self.terms {
            n.iter_mut().zip(&t.vector).for_each(|(d, y)| *d += t.weight * y * y);
        }
        n
    }

    /// `θ·new + (1-θ)·self`, recompressed channel by channel.
    pub fn mix(&self, new: &DensityOperator, theta: f64) -> Result<DensityOperator> {
        let mut channels: Vec<Channel> = self.terms.iter().chain(&new.terms).map(|t| t.channel).collect();
        channels.sort();
        channels.dedup();
        let mut terms = Vec::new();
        for ch in channels {
            let mut pieces: Vec<(f64, &[f64])> = Vec::new();
            for t in self.terms.iter().filter(|t| t.channel == ch) {
                pieces.push(((1.0 - theta) * t.weight, &t.vector));
            }
            for t in new.terms.iter().filter(|t| t.channel == ch) {
                pieces.push((theta * t.weight, &t.vector));
            }
            terms.extend(compress(ch, &pieces)?);
        }
        Ok(DensityOperator {
            terms,
            single_electron: new.single_electron,
        })
    }
}

/// Rewrites `Σ c_i y_i y_iᵀ` as an eigen-expansion over an orthonormal basis of
/// the span, dropping negligible weights.
fn compress(channel: Channel, pieces: &[(f64, &[f64])]) -> Result<Vec<DensityTerm>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for (_, y) in pieces {
        let mut v = y.to_vec();
        for _ in 0..2 {
            for b in &basis {
                let p: f64 = b.iter().zip(&v).map(|(a, c)| a * c).sum();
                v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= p * bi);
            }
        }
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-9 {
            v.iter_mut().for_each(|a| *a /= n);
            basis.push(v);
        }
    }
    let r = basis.len();
    let mut small = Array2::<f64>::zeros((r, r));
    let proj: Vec<Vec<f64>> = pieces
        .iter()
        .map(|(_, y)| basis.iter().map(|b| b.iter().zip(y.iter()).map(|(a, c)| a * c).sum()).collect())
        .collect();
    for ((c, _), p) in pieces.iter().zip(&proj) {
        for i in 0..r {
            for j in 0..r {
                small[[i, j]] += c * p[i] * p[j];
            }
        }
    }
    let (vals, vecs) = sym_eigen(&small)?;
    let top = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut out = Vec::new();
    for (k, &mu) in vals.iter().enumerate() {
        if mu.abs() <= 1e-13 * top.max(1e-300) {
            continue;
        }
        let dim = basis.first().map(|b| b.len()).unwrap_or(0);
        let mut y = vec![0.0; dim];
        for (i, b) in basis.iter().enumerate() {
            let s = vecs[[i, k]];
            y.iter_mut().zip(b).for_each(|(yy, bb)| *yy += s * bb);
        }
        out.push(DensityTerm {
            channel,
            weight: mu,
            vector: y,
        });
    }
    Ok(out)
}

/// Mean-field operator of `channel` generated by a density operator:
/// the bare operator, the direct potential of the total density and, for each
/// density term `w y yᵀ` in channel `b`, exchange `-w Λ^k(κ,b) diag(y) S^k diag(y)`.
pub fn mean_field_from_density(problem: &Problem, gamma: &DensityOperator, channel: Channel) -> Result<ChannelOperator> {
    check_supported(channel)?;
    let mut op = problem.one_body(channel)?;
    if gamma.terms.is_empty() {
        return Ok(op);
    }
    let space = problem.space();
    let n = gamma.coordinate_density(space.dim());
    let direct = apply_kernel(space, 0, &n);
    op.add_local_potential(&direct)?;
    for t in &gamma.terms {
        if gamma.single_electron {
            if t.channel == channel {
                op.add_exchange(ExchangeTerm {
                    k: 0,
                    coefficient: t.weight,
                    orbital: t.vector.clone(),
                })?;
            }
            continue;
        }
        for k in multipoles(channel, t.channel) {
            let coef = exchange_coefficient(channel, t.channel, k);
            if coef != 0.0 {
                op.add_exchange(ExchangeTerm {
                    k,
                    coefficient: t.weight * coef,
                    orbital: t.vector.clone(),
                })?;
            }
        }
    }
    Ok(op)
}

pub fn mean_field_matrix(psi: &Configuration, channel: Channel) -> Result<ChannelOperator> {
    mean_field_from_density(&psi.problem, &DensityOperator::from_configuration(psi), channel)
}

/// Shifted Rayleigh quotient `ε - c²` and residual `‖(F - ε)x‖` of each shell.
pub fn orbital_residuals(psi: &Configuration) -> Result<Vec<(f64, f64)>> {
    let gamma = DensityOperator::from_configuration(psi);
    let mut ops: Vec<(Channel, ChannelOperator)> = Vec::new();
    let mut out = Vec::with_capacity(psi.shells.len());
    for s in &psi.shells {
        if !ops.iter().any(|(c, _)| *c == s.channel) {
            ops.push((s.channel, mean_field_from_density(&psi.problem, &gamma, s.channel)?));
        }
        let op = &ops.iter().find(|(c, _)| *c == s.channel).expect("built above").1;
        let mut fx = vec![0.0; s.coords.len()];
        op.apply_shifted(&s.coords, &mut fx);
        let eps: f64 = fx.iter().zip(&s.coords).map(|(a, b)| a * b).sum();
        let res = fx.iter().zip(&s.coords).map(|(a, b)| (a - eps * b).powi(2)).sum::<f64>().sqrt();
        out.push((eps, res));
    }
    Ok(out)
}
