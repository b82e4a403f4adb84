//! Self-consistent solution of the projected equations `P⁺ H̄ P⁺ ψ = λ ψ`.

use ndarray::{Array1, Array2};

use super::FreeSpectrum;
use crate::dirac_fock::{
    aufbau, iterate, mean_field_from_density, mean_field_matrix, orbital_residuals,
    spectral_projector, Configuration, DensityOperator, Problem, Projector, ProjectorSource, ScfReport,
};
use crate::error::{invalid, Error, Result};
use crate::linalg::dense::{matmul, refine_eigenpair, sym_eigen};
use crate::linalg::dot;
use crate::radial::Channel;

/// Where the positive projector of each occupied channel comes from.
#[derive(Clone, Debug)]
pub enum PositiveProjectors {
    /// `Λ⁺_c`, fixed.
    Free,
    /// `χ_[0,∞)` of the current mean-field operator, updated every iteration.
    MeanField,
    /// Fixed user-supplied projectors, one per occupied channel.
    Fixed(Vec<Projector>),
}

impl PositiveProjectors {
    pub fn source(&self) -> ProjectorSource {
        match self {
            PositiveProjectors::Free => ProjectorSource::Free,
            PositiveProjectors::MeanField => ProjectorSource::MeanField,
            PositiveProjectors::Fixed(p) => p.first().map(|p| p.source).unwrap_or(ProjectorSource::File),
        }
    }

    /// The fixed projectors for the occupied channels of `problem`, or
    /// `None` for the self-consistent choice.
    pub(crate) fn resolve(&self, problem: &Problem) -> Result<Option<Vec<Projector>>> {
        let c = problem
            .hamiltonian
            .c()
            .ok_or_else(|| invalid("positive projectors need a relativistic problem"))?;
        let channels = problem.occupied_channels();
        match self {
            PositiveProjectors::MeanField => Ok(None),
            PositiveProjectors::Free => channels
                .iter()
                .map(|ch| match ch {
                    Channel::Dirac(k) => Ok(FreeSpectrum::new(&problem.grid, *k, c)?.positive()),
                    Channel::Schrodinger(_) => Err(invalid("free projector needs a Dirac channel")),
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            PositiveProjectors::Fixed(list) => {
                let dim = problem.space().dim();
                channels
                    .iter()
                    .map(|ch| {
                        let p = list
                            .iter()
                            .find(|p| p.channel == *ch)
                            .ok_or_else(|| Error::Dimension(format!("no projector supplied for channel {ch}")))?;
                        if p.dim() != dim {
                            return Err(Error::Dimension(format!(
                                "projector for {ch} acts on {} coordinates, the channel space has {dim}",
                                p.dim()
                            )));
                        }
                        Ok(p.clone())
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(Some)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProjectedScfReport {
    pub scf: ScfReport,
    pub source: ProjectorSource,
    /// `‖(1 - P⁺)ψ_k‖` for the final orbitals.
    pub range_residuals: Vec<f64>,
}

fn find<'a>(fixed: &'a [Projector], ch: Channel) -> &'a Projector {
    fixed.iter().find(|p| p.channel == ch).expect("projector resolved for every occupied channel")
}

/// Lowest `count` in-gap eigenpairs of `Bᵀ F B`, lifted back by `B`.
fn compressed_states(f: &Array2<f64>, basis: &Array2<f64>, shift: f64, count: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let fb = matmul(f.view(), basis.view());
    let mut a = matmul(basis.t(), fb.view());
    crate::linalg::dense::symmetrize(&mut a);
    let (vals, vecs) = sym_eigen(&a)?;
    in_gap(&a, &vals, &vecs, shift, count, |v| basis.dot(&v).to_vec())
}

/// The lowest `count` eigenpairs with values in `(-shift, 0)`, polished.
fn in_gap(
    a: &Array2<f64>,
    vals: &Array1<f64>,
    vecs: &Array2<f64>,
    shift: f64,
    count: usize,
    lift: impl Fn(Array1<f64>) -> Vec<f64>,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut values = Vec::with_capacity(count);
    let mut states = Vec::with_capacity(count);
    for i in (0..vals.len()).filter(|&i| vals[i] > -shift && vals[i] < 0.0).take(count) {
        let (theta, x) = refine_eigenpair(a, vecs.column(i), 2)?;
        values.push(theta);
        states.push(lift(x));
    }
    Ok((values, states))
}

fn projected_residuals(psi: &Configuration, fixed: &[Projector]) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(psi.shells.len());
    for s in &psi.shells {
        let op = mean_field_matrix(psi, s.channel)?;
        let mut fx = vec![0.0; s.coords.len()];
        op.apply_shifted(&s.coords, &mut fx);
        let eps = dot(&fx, &s.coords);
        let r: Vec<f64> = fx.iter().zip(&s.coords).map(|(a, b)| a - eps * b).collect();
        let pr = find(fixed, s.channel).apply(&r);
        out.push((eps, dot(&pr, &pr).sqrt()));
    }
    Ok(out)
}

/// Solves the projected Dirac-Fock equations: at every iteration the mean
/// field is compressed to the range of `P⁺` and the lowest in-gap eigenpairs
/// of the compression are occupied. With [`PositiveProjectors::MeanField`]
/// the projector is the positive spectral projector of the operator itself,
/// which reproduces the unprojected SCF.
pub fn projected_scf(problem: &Problem, projectors: &PositiveProjectors) -> Result<ProjectedScfReport> {
    let fixed = projectors.resolve(problem)?;
    let start = crate::dirac_fock::initial_guess(problem)?;
    let shift = problem.hamiltonian.rest_energy();
    let scf = match &fixed {
        Some(fixed) => iterate(
            problem,
            start,
            |gamma: &DensityOperator, _psi: &Configuration| {
                aufbau(problem, |ch, count| {
                    let f = mean_field_from_density(problem, gamma, ch)?.shifted_matrix();
                    compressed_states(&f, &find(fixed, ch).basis, shift, count)
                })
            },
            |psi| projected_residuals(psi, fixed),
        )?,
        None => iterate(
            problem,
            start,
            |gamma: &DensityOperator, _psi: &Configuration| {
                aufbau(problem, |ch, count| {
                    let op = mean_field_from_density(problem, gamma, ch)?;
                    let f = op.shifted_matrix();
                    let (vals, vecs) = sym_eigen(&f)?;
                    in_gap(&f, &vals, &vecs, shift, count, |v| v.to_vec())
                })
            },
            // ‖(F - ε)ψ‖ bounds the projected residual for the spectral projector
            orbital_residuals,
        )?,
    };

    let psi = &scf.configuration;
    let mut range_residuals = Vec::with_capacity(psi.shells.len());
    let own: Vec<Projector> = match &fixed {
        Some(f) => f.clone(),
        None => problem
            .occupied_channels()
            .into_iter()
            .map(|ch| spectral_projector(&mean_field_matrix(psi, ch)?, 0.0))
            .collect::<Result<_>>()?,
    };
    for s in &psi.shells {
        let p = find(&own, s.channel).apply(&s.coords);
        let r: f64 = s.coords.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum();
        range_residuals.push(r.sqrt());
    }
    Ok(ProjectedScfReport {
        scf,
        source: projectors.source(),
        range_residuals,
    })
}
