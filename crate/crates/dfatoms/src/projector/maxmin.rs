//! The min-max energy `E(P⁺) = inf_{Φ⁺ ⊂ ran P⁺} sup_{Ψ ⊂ ran P⁻ ⊕ span Φ⁺} E_c(Ψ)`
//! on a coarse grid.
//!
//! Frames are handled channel by channel in coordinates: `Φ⁺ = B₊ Y` for an
//! orthonormal basis `B₊` of the positive range, and `Ψ = [B₋, Φ⁺] C` for the
//! inner space. Both levels are Riemannian gradient methods on the Stiefel
//! manifold with a Löwdin retraction and backtracking; the gradient is taken
//! in the metric `(|A - θ| + δ)`, with `A` the compressed mean field, which
//! removes the `c²` and `cσ_max` scales that make the plain gradient useless.
//! The outer gradient follows Danskin's rule through the inner maximizer.

use ndarray::{s, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::FreeSpectrum;
use super::PositiveProjectors;
use crate::dirac_fock::{
    df_energy, initial_guess, mean_field_matrix, orbital_residuals, scf_solve, spectral_split, Configuration, Problem, ProjectorSource,
    Shell,
};
use crate::error::{invalid, Error, Result};
use crate::linalg::dense::{matmul, sym_eigen};
use crate::radial::Channel;

/// Largest grid accepted by [`maxmin_energy`].
pub const MAXMIN_GRID_LIMIT: usize = 120;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxMinControls {
    /// Stop the inner ascent when the Riemannian gradient norm drops below this.
    pub inner_tol: f64,
    /// Stop the outer descent when the Danskin gradient norm drops below this.
    pub outer_tol: f64,
    pub max_inner: usize,
    pub max_outer: usize,
    pub max_restarts: usize,
    pub seed: u64,
    /// `δ` in the preconditioning metric, in Hartree.
    pub metric_floor: f64,
}

impl Default for MaxMinControls {
    fn default() -> Self {
        Self {
            inner_tol: 1e-9,
            outer_tol: 1e-7,
            max_inner: 200,
            max_outer: 400,
            max_restarts: 3,
            seed: 7,
            metric_floor: 0.25,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MinMaxReport {
    /// Physical `E(P⁺)`.
    pub e_outer: f64,
    /// `E(P⁺) - N c²`.
    pub e_outer_shifted: f64,
    /// Shifted energies along every inner ascent, one list per solve.
    pub inner_sup_values: Vec<Vec<f64>>,
    /// Shifted sup values at the accepted outer iterates.
    pub outer_iterates: Vec<f64>,
    pub outer_gradient_norms: Vec<f64>,
    pub projector_source: ProjectorSource,
    pub e_scf_shifted: f64,
    pub gap_to_scf: f64,
    pub converged: bool,
    pub restarts: usize,
    #[serde(skip)]
    pub configuration: Option<Configuration>,
}

struct Frame {
    channel: Channel,
    weight: f64,
    /// indices of this channel's shells in the problem
    shells: Vec<usize>,
    pos: Array2<f64>,
    neg: Array2<f64>,
}

impl Frame {
    fn phi(&self, y: &Array2<f64>) -> Array2<f64> {
        matmul(self.pos.view(), y.view())
    }

    fn inner_basis(&self, y: &Array2<f64>) -> Array2<f64> {
        let phi = self.phi(y);
        let mut b = Array2::zeros((self.pos.nrows(), self.neg.ncols() + phi.ncols()));
        b.slice_mut(s![.., ..self.neg.ncols()]).assign(&self.neg);
        b.slice_mut(s![.., self.neg.ncols()..]).assign(&phi);
        b
    }
}

/// `X (XᵀX)^{-1/2}`.
fn orthonormalize(x: &Array2<f64>) -> Result<Array2<f64>> {
    let g = matmul(x.t(), x.view());
    let (vals, vecs) = sym_eigen(&g)?;
    if vals.iter().any(|v| !(*v > 1e-300)) {
        return Err(Error::Optimizer("frame lost rank".into()));
    }
    let mut scaled = vecs.clone();
    for (j, v) in vals.iter().enumerate() {
        scaled.column_mut(j).mapv_inplace(|a| a / v.sqrt());
    }
    Ok(matmul(x.view(), matmul(scaled.view(), vecs.t()).view()))
}

/// Removes the symmetric part `C sym(CᵀD)` so that `D` is tangent at `C`.
fn tangent(c: &Array2<f64>, d: &Array2<f64>) -> Array2<f64> {
    let m = matmul(c.t(), d.view());
    let sym = (&m + &m.t()) * 0.5;
    d - &matmul(c.view(), sym.view())
}

fn inner(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Applies `(|A - θ_j| + δ)⁻¹` to column `j` of `r`, with `θ_j = (CᵀAC)_jj`.
fn precondition(a: &Array2<f64>, c: &Array2<f64>, r: &Array2<f64>, floor: f64) -> Result<Array2<f64>> {
    let (vals, vecs) = sym_eigen(a)?;
    let ac = matmul(a.view(), c.view());
    let mut out = Array2::zeros(r.raw_dim());
    for j in 0..r.ncols() {
        let theta: f64 = c.column(j).dot(&ac.column(j));
        let coef = vecs.t().dot(&r.column(j));
        let scaled = ndarray::Array1::from_shape_fn(coef.len(), |i| coef[i] / ((vals[i] - theta).abs() + floor));
        out.column_mut(j).assign(&vecs.dot(&scaled));
    }
    Ok(out)
}

struct State<'a> {
    problem: &'a Problem,
    frames: Vec<Frame>,
    controls: MaxMinControls,
}

impl<'a> State<'a> {
    fn configuration(&self, ys: &[Array2<f64>], cs: &[Array2<f64>]) -> Configuration {
        let mut shells: Vec<Option<Shell>> = vec![None; self.problem.shells.len()];
        for ((f, y), c) in self.frames.iter().zip(ys).zip(cs) {
            let psi = matmul(f.inner_basis(y).view(), c.view());
            for (col, &slot) in f.shells.iter().enumerate() {
                let spec = self.problem.shells[slot];
                shells[slot] = Some(Shell {
                    n: spec.n,
                    channel: spec.channel,
                    occupation: spec.occupation,
                    coords: psi.column(col).to_vec(),
                    binding: 0.0,
                });
            }
        }
        Configuration {
            problem: self.problem.clone(),
            shells: shells.into_iter().map(|s| s.expect("every shell framed")).collect(),
        }
    }

    fn energy(&self, ys: &[Array2<f64>], cs: &[Array2<f64>]) -> Result<f64> {
        Ok(df_energy(&self.configuration(ys, cs))?.shifted)
    }

    /// Shifted mean-field matrices at the configuration.
    fn mean_fields(&self, cfg: &Configuration) -> Result<Vec<Array2<f64>>> {
        self.frames
            .iter()
            .map(|f| Ok(mean_field_matrix(cfg, f.channel)?.shifted_matrix()))
            .collect()
    }

    /// Gradient ascent over the inner frames; returns the maximizer, the
    /// trace of energies and whether the gradient tolerance was reached.
    fn ascend(&self, ys: &[Array2<f64>], start: &[Array2<f64>]) -> Result<(Vec<Array2<f64>>, Vec<f64>, bool)> {
        let ctl = self.controls;
        let mut cs: Vec<Array2<f64>> = start.to_vec();
        let mut e = self.energy(ys, &cs)?;
        let mut trace = vec![e];
        for _ in 0..ctl.max_inner {
            let cfg = self.configuration(ys, &cs);
            let fs = self.mean_fields(&cfg)?;
            let mut grads = Vec::new();
            let mut dirs = Vec::new();
            let mut gnorm2 = 0.0;
            for ((f, y), (fm, c)) in self.frames.iter().zip(ys).zip(fs.iter().zip(&cs)) {
                let b = f.inner_basis(y);
                let a = matmul(b.t(), matmul(fm.view(), b.view()).view());
                let r = tangent(c, &(matmul(a.view(), c.view()) * (2.0 * f.weight)));
                gnorm2 += inner(&r, &r);
                let d = tangent(c, &precondition(&a, c, &r, ctl.metric_floor)?);
                grads.push(r);
                dirs.push(d);
            }
            if gnorm2.sqrt() < ctl.inner_tol {
                return Ok((cs, trace, true));
            }
            let slope: f64 = grads.iter().zip(&dirs).map(|(g, d)| inner(g, d)).sum();
            let mut tau = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let trial: Vec<Array2<f64>> = cs
                    .iter()
                    .zip(&dirs)
                    .zip(&self.frames)
                    .map(|((c, d), f)| orthonormalize(&(c + &(d * (tau / (2.0 * f.weight))))))
                    .collect::<Result<_>>()?;
                let et = self.energy(ys, &trial)?;
                if et > 10.0 {
                    return Err(Error::Optimizer(format!(
                        "inner ascent exceeded N c² + 10 (E - N c² = {et}); the projector is too far from the free one or c is too small"
                    )));
                }
                if et >= e + 1e-4 * tau * slope / 2.0 {
                    cs = trial;
                    e = et;
                    trace.push(e);
                    accepted = true;
                    break;
                }
                tau *= 0.5;
            }
            if !accepted {
                // no ascent left at working precision
                return Ok((cs, trace, gnorm2.sqrt() < 1e3 * ctl.inner_tol));
            }
        }
        Ok((cs, trace, false))
    }

    /// Danskin gradient of the sup with respect to the outer coordinates,
    /// preconditioned, plus its norm.
    fn outer_direction(&self, ys: &[Array2<f64>], cs: &[Array2<f64>]) -> Result<(Vec<Array2<f64>>, Vec<Array2<f64>>, f64)> {
        let cfg = self.configuration(ys, cs);
        let fs = self.mean_fields(&cfg)?;
        let mut grads = Vec::new();
        let mut dirs = Vec::new();
        let mut gnorm2 = 0.0;
        for ((f, y), (fm, c)) in self.frames.iter().zip(ys).zip(fs.iter().zip(cs)) {
            let psi = matmul(f.inner_basis(y).view(), c.view());
            let coef = c.slice(s![f.neg.ncols().., ..]).to_owned();
            let fpsi = matmul(fm.view(), psi.view());
            let g = matmul(f.pos.t(), matmul(fpsi.view(), coef.t()).view()) * (2.0 * f.weight);
            let g = tangent(y, &g);
            gnorm2 += inner(&g, &g);
            let apos = matmul(f.pos.t(), matmul(fm.view(), f.pos.view()).view());
            let d = tangent(y, &precondition(&apos, y, &g, self.controls.metric_floor)?);
            grads.push(g);
            dirs.push(d);
        }
        Ok((grads, dirs, gnorm2.sqrt()))
    }
}

fn frames_for(problem: &Problem, projectors: &PositiveProjectors, scf: &Configuration) -> Result<Vec<Frame>> {
    let c = problem.hamiltonian.c().ok_or_else(|| invalid("maxmin_energy needs a relativistic problem"))?;
    let mut frames = Vec::new();
    for ch in problem.occupied_channels() {
        let shells: Vec<usize> = (0..problem.shells.len()).filter(|&i| problem.shells[i].channel == ch).collect();
        let weight = if problem.is_single_electron() {
            1.0
        } else {
            problem.shells[shells[0]].occupation as f64
        };
        let (pos, neg) = match projectors {
            PositiveProjectors::Free => {
                let k = match ch {
                    Channel::Dirac(k) => k,
                    Channel::Schrodinger(_) => return Err(invalid("free projector needs a Dirac channel")),
                };
                let fs = FreeSpectrum::new(&problem.grid, k, c)?;
                (fs.positive().basis, fs.negative().basis)
            }
            PositiveProjectors::MeanField => {
                let (p, n) = spectral_split(&mean_field_matrix(scf, ch)?, 0.0)?;
                (p.basis, n.basis)
            }
            PositiveProjectors::Fixed(list) => {
                let p = list
                    .iter()
                    .find(|p| p.channel == ch)
                    .ok_or_else(|| Error::Dimension(format!("no projector supplied for channel {ch}")))?;
                if p.dim() != problem.space().dim() {
                    return Err(Error::Dimension(format!("projector for {ch} has the wrong dimension")));
                }
                (p.basis.clone(), p.complement()?.basis)
            }
        };
        if pos.ncols() < shells.len() {
            return Err(Error::Dimension(format!("positive range of {ch} is smaller than its shell count")));
        }
        frames.push(Frame {
            channel: ch,
            weight,
            shells,
            pos,
            neg,
        });
    }
    Ok(frames)
}

/// Evaluates `E(P⁺)` by inner ascent and outer Danskin descent, starting
/// from the screened-Coulomb guess compressed to the positive range, and
/// compares it with the SCF energy on the same grid. With
/// [`PositiveProjectors::MeanField`] the projector is the positive spectral
/// projector of the converged SCF mean field.
pub fn maxmin_energy(problem: &Problem, projectors: &PositiveProjectors, controls: MaxMinControls) -> Result<MinMaxReport> {
    if problem.grid.len() > MAXMIN_GRID_LIMIT {
        return Err(invalid(format!(
            "maxmin_energy is a coarse-grid verification tool (M ≤ {MAXMIN_GRID_LIMIT}, got {})",
            problem.grid.len()
        )));
    }
    let scf = scf_solve(problem)?;
    if !scf.converged {
        return Err(Error::NotConverged {
            solver: "scf_solve",
            iterations: scf.iterations,
        });
    }
    let state = State {
        problem,
        frames: frames_for(problem, projectors, &scf.configuration)?,
        controls,
    };
    let guess = initial_guess(problem)?;
    let mut ys: Vec<Array2<f64>> = Vec::new();
    for f in &state.frames {
        let mut x = Array2::zeros((f.pos.nrows(), f.shells.len()));
        for (j, &slot) in f.shells.iter().enumerate() {
            x.column_mut(j).assign(&ndarray::Array1::from(guess.shells[slot].coords.clone()));
        }
        ys.push(orthonormalize(&matmul(f.pos.t(), x.view()))?);
    }
    let start_inner = |frames: &[Frame]| -> Vec<Array2<f64>> {
        frames
            .iter()
            .map(|f| {
                let s = f.shells.len();
                let mut c = Array2::zeros((f.neg.ncols() + s, s));
                for j in 0..s {
                    c[[f.neg.ncols() + j, j]] = 1.0;
                }
                c
            })
            .collect()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(controls.seed);
    let mut restarts = 0;
    let mut traces = Vec::new();
    let mut outer_values = Vec::new();
    let mut outer_norms = Vec::new();
    let mut cs = start_inner(&state.frames);
    let (mut cs_star, trace, _) = state.ascend(&ys, &cs)?;
    let mut e_sup = *trace.last().expect("trace starts with the initial value");
    traces.push(trace);
    let mut converged = false;

    for _ in 0..controls.max_outer {
        outer_values.push(e_sup);
        let (grads, dirs, gnorm) = state.outer_direction(&ys, &cs_star)?;
        outer_norms.push(gnorm);
        if gnorm < controls.outer_tol {
            converged = true;
            break;
        }
        let slope: f64 = grads.iter().zip(&dirs).map(|(g, d)| inner(g, d)).sum();
        let mut tau = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<Array2<f64>> = ys
                .iter()
                .zip(&dirs)
                .zip(&state.frames)
                .map(|((y, d), f)| orthonormalize(&(y - &(d * (tau / (2.0 * f.weight))))))
                .collect::<Result<_>>()?;
            let (c_try, trace, ok) = state.ascend(&trial, &cs_star)?;
            let e_try = *trace.last().expect("nonempty trace");
            traces.push(trace);
            if ok && e_try <= e_sup - 1e-4 * tau * slope / 2.0 {
                ys = trial;
                cs_star = c_try;
                e_sup = e_try;
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if !accepted {
            if gnorm < 1e2 * controls.outer_tol {
                converged = true;
                break;
            }
            if restarts >= controls.max_restarts {
                break;
            }
            // the inner maximizer looks degenerate: perturb the outer frame
            restarts += 1;
            ys = ys
                .iter()
                .map(|y| {
                    let noise = Array2::from_shape_fn(y.raw_dim(), |_| rng.gen_range(-1e-3..1e-3));
                    orthonormalize(&(y + &noise))
                })
                .collect::<Result<_>>()?;
            cs = start_inner(&state.frames);
            let (c_new, trace, _) = state.ascend(&ys, &cs)?;
            cs_star = c_new;
            e_sup = *trace.last().expect("nonempty trace");
            traces.push(trace);
        }
    }

    let n = problem.electron_count() as f64;
    let rest = problem.hamiltonian.rest_energy();
    let mut cfg = state.configuration(&ys, &cs_star);
    let multipliers = orbital_residuals(&cfg)?;
    for (s, (eps, _)) in cfg.shells.iter_mut().zip(multipliers) {
        s.binding = eps;
    }
    Ok(MinMaxReport {
        e_outer: e_sup + n * rest,
        e_outer_shifted: e_sup,
        inner_sup_values: traces,
        outer_iterates: outer_values,
        outer_gradient_norms: outer_norms,
        projector_source: match projectors {
            PositiveProjectors::Free => ProjectorSource::Free,
            PositiveProjectors::MeanField => ProjectorSource::MeanField,
            PositiveProjectors::Fixed(_) => ProjectorSource::File,
        },
        e_scf_shifted: scf.energy.shifted,
        gap_to_scf: (e_sup - scf.energy.shifted).abs(),
        converged,
        restarts,
        configuration: Some(cfg),
    })
}
