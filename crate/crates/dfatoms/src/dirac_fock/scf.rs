//! Self-consistent field driver.

use super::config::{fix_sign, node_count, Configuration, Problem, Shell};
use super::energy::{df_energy, EnergyBreakdown};
use super::mean_field::{mean_field_from_density, orbital_residuals, DensityOperator};
use super::spectral::{lambda_minus_residual_with_method, ResidualMethod};
use crate::error::{Error, Result};
use crate::radial::{lowest_states, Channel, ChannelOperator};

#[derive(Clone, Debug)]
pub struct ScfReport {
    pub configuration: Configuration,
    pub energy: EnergyBreakdown,
    pub iterations: usize,
    /// `E - N c²` after each iteration.
    pub energy_history: Vec<f64>,
    /// Largest orbital residual after each iteration.
    pub residual_history: Vec<f64>,
    pub orbital_residuals: Vec<f64>,
    pub lambda_minus_residuals: Vec<f64>,
    pub lambda_minus_method: ResidualMethod,
    pub converged: bool,
}

pub type SCFReport = ScfReport;

/// Occupies in-window states of each channel operator. A shell with principal
/// number `n` takes the `(n - ℓ - 1)`-th level of its channel, which for the
/// ground configurations accepted by [`Problem`] is Aufbau filling.
///
/// `solve` returns the `count` lowest eigenpairs (shifted values, ascending).
pub(crate) fn aufbau<F>(problem: &Problem, mut solve: F) -> Result<Configuration>
where
    F: FnMut(Channel, usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)>,
{
    let space = problem.space().clone();
    let mut shells: Vec<Option<Shell>> = vec![None; problem.shells.len()];
    for ch in problem.occupied_channels() {
        let members: Vec<usize> = (0..problem.shells.len()).filter(|&i| problem.shells[i].channel == ch).collect();
        let level = |i: usize| (problem.shells[i].n - ch.l() - 1) as usize;
        let count = members.iter().map(|&i| level(i) + 1).max().unwrap_or(0);
        let (values, mut vectors) = solve(ch, count)?;
        if values.len() < count {
            return Err(Error::NoBoundState(format!(
                "{ch}: {} of {count} required states lie in the gap",
                values.len()
            )));
        }
        for v in vectors.iter_mut() {
            fix_sign(&space, v);
        }
        let nodes: Vec<usize> = vectors.iter().map(|v| node_count(&space, v)).collect();
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by(|&a, &b| {
            let (va, vb) = (values[a], values[b]);
            let tie = 1e-12 * va.abs().max(vb.abs()).max(1.0);
            if (va - vb).abs() <= tie {
                nodes[a].cmp(&nodes[b])
            } else {
                va.total_cmp(&vb)
            }
        });
        for w in order.windows(2) {
            let (a, b) = (w[0], w[1]);
            let tie = 1e-12 * values[a].abs().max(values[b].abs()).max(1.0);
            if (values[a] - values[b]).abs() <= tie && nodes[a] == nodes[b] {
                return Err(Error::Degenerate(format!(
                    "{ch}: eigenvalues {} and {} coincide with equal node counts",
                    values[a], values[b]
                )));
            }
        }
        for &slot in &members {
            let o = order[level(slot)];
            let spec = problem.shells[slot];
            shells[slot] = Some(Shell {
                n: spec.n,
                channel: ch,
                occupation: spec.occupation,
                coords: vectors[o].clone(),
                binding: values[o],
            });
        }
    }
    Ok(Configuration {
        problem: problem.clone(),
        shells: shells.into_iter().map(|s| s.expect("every shell assigned")).collect(),
    })
}

/// Orbitals of the screened bare operator with `Z_eff = Z - (N-1)/2`.
pub fn initial_guess(problem: &Problem) -> Result<Configuration> {
    let n_el = problem.electron_count() as f64;
    let z_eff = problem.nuclear.z - 0.5 * (n_el - 1.0).max(0.0);
    let screened = problem.nuclear.with_charge(z_eff)?;
    aufbau(problem, |ch, count| {
        let op = problem.one_body_with(ch, &screened)?;
        let pairs = lowest_states(&op, count, &[], 1e-12)?;
        Ok((pairs.values, pairs.vectors))
    })
}

fn davidson_tol(problem: &Problem) -> f64 {
    (1e-2 * problem.controls.tol_orbital).max(1e-13)
}

/// Solves the channel eigenproblems of the (mixed) density operator `gamma`.
fn diagonalize(problem: &Problem, gamma: &DensityOperator, current: &Configuration) -> Result<Configuration> {
    let sigma = problem.controls.level_shift;
    let tol = davidson_tol(problem);
    aufbau(problem, |ch, count| {
        let mut op: ChannelOperator = mean_field_from_density(problem, gamma, ch)?;
        let occupied: Vec<Vec<f64>> = current
            .shells
            .iter()
            .filter(|s| s.channel == ch)
            .map(|s| s.coords.clone())
            .collect();
        op.add_level_shift(sigma, &occupied)?;
        let pairs = lowest_states(&op, count, &occupied, tol)?;
        Ok((pairs.values, pairs.vectors))
    })
}

/// Self-consistent field iteration with density-operator mixing.
pub fn scf_solve(problem: &Problem) -> Result<ScfReport> {
    let guess = initial_guess(problem)?;
    scf_from(problem, guess)
}

pub fn scf_from(problem: &Problem, start: Configuration) -> Result<ScfReport> {
    iterate(problem, start, |gamma, psi| diagonalize(problem, gamma, psi), orbital_residuals)
}

/// The fixed-point loop shared by the plain and projected solvers. `step`
/// maps the mixed density operator (and the current orbitals) to new
/// orbitals; `residuals` gives `(ε - c², ‖residual‖)` per shell.
pub(crate) fn iterate<S, R>(problem: &Problem, start: Configuration, mut step: S, residuals_of: R) -> Result<ScfReport>
where
    S: FnMut(&DensityOperator, &Configuration) -> Result<Configuration>,
    R: Fn(&Configuration) -> Result<Vec<(f64, f64)>>,
{
    let ctl = problem.controls;
    let mut psi = start;
    let mut mixed: Option<DensityOperator> = None;
    let mut energy_history = Vec::new();
    let mut residual_history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut residuals: Vec<f64> = Vec::new();

    for it in 0..=ctl.max_iter {
        let res = residuals_of(&psi)?;
        for (s, (eps, _)) in psi.shells.iter_mut().zip(&res) {
            s.binding = *eps;
        }
        residuals = res.iter().map(|(_, r)| *r).collect();
        let max_res = residuals.iter().fold(0.0_f64, |m, r| m.max(*r));
        let e = df_energy(&psi)?.shifted;
        let de = energy_history.last().map(|p: &f64| (e - p).abs());
        energy_history.push(e);
        residual_history.push(max_res);
        iterations = it;
        if let Some(de) = de {
            if de < ctl.tol_energy * e.abs().max(1.0) && max_res < ctl.tol_orbital {
                converged = true;
                break;
            }
        } else if psi.shells.is_empty() {
            converged = true;
            break;
        }
        if it == ctl.max_iter {
            break;
        }
        let fresh = DensityOperator::from_configuration(&psi);
        let gamma = match &mixed {
            None => fresh,
            Some(old) => old.mix(&fresh, ctl.mixing)?,
        };
        psi = step(&gamma, &psi)?;
        mixed = Some(gamma);
    }

    let energy = df_energy(&psi)?;
    let (lambda_minus_residuals, lambda_minus_method) = lambda_minus_residual_with_method(&psi)?;
    Ok(ScfReport {
        configuration: psi,
        energy,
        iterations,
        energy_history,
        residual_history,
        orbital_residuals: residuals,
        lambda_minus_residuals,
        lambda_minus_method,
        converged,
    })
}
