//! The radial energy functional.

use serde::{Deserialize, Serialize};

use super::config::Configuration;
use super::mean_field::orbital_residuals;
use crate::error::Result;
use crate::linalg::dot;
use crate::radial::{apply_kernel, exchange_coefficient, intra_shell_weight, multipoles, ChannelSpace};

/// Energy components in Hartree. `shifted` is `total - N c²`, computed without
/// ever forming `total`, and `eigenvalue_sum_shifted` likewise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub total: f64,
    pub shifted: f64,
    pub one_body: f64,
    pub one_body_shifted: f64,
    pub direct: f64,
    pub exchange: f64,
    pub eigenvalue_sum: f64,
    pub eigenvalue_sum_shifted: f64,
}

impl EnergyBreakdown {
    /// Electron-electron energy `direct - exchange`.
    pub fn two_body(&self) -> f64 {
        self.direct - self.exchange
    }
}

fn pair_density(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn slater(space: &ChannelSpace, k: u32, a: &[f64], b: &[f64]) -> f64 {
    dot(a, &apply_kernel(space, k, b))
}

pub fn df_energy(psi: &Configuration) -> Result<EnergyBreakdown> {
    let space = psi.space().clone();
    let rest = psi.rest_energy();
    let n_el = psi.electron_count() as f64;
    let mut one_body_shifted = 0.0;
    let mut ops = Vec::new();
    for s in &psi.shells {
        if !ops.iter().any(|(c, _)| *c == s.channel) {
            ops.push((s.channel, psi.problem.one_body(s.channel)?));
        }
        let op = &ops.iter().find(|(c, _)| *c == s.channel).expect("built above").1;
        let mut hx = vec![0.0; s.coords.len()];
        op.apply_shifted(&s.coords, &mut hx);
        one_body_shifted += s.occupation as f64 * dot(&s.coords, &hx);
    }

    let dens: Vec<Vec<f64>> = psi.shells.iter().map(|s| pair_density(&s.coords, &s.coords)).collect();
    let mut direct = 0.0;
    let mut two_body = 0.0;
    for (a, sa) in psi.shells.iter().enumerate() {
        let wa = sa.occupation as f64;
        let pot = apply_kernel(&space, 0, &dens[a]);
        for (b, sb) in psi.shells.iter().enumerate() {
            let wb = sb.occupation as f64;
            let f0 = dot(&dens[b], &pot);
            direct += 0.5 * wa * wb * f0;
            if b > a {
                let mut e = f0;
                let rho = pair_density(&sa.coords, &sb.coords);
                for k in multipoles(sa.channel, sb.channel) {
                    let lam = exchange_coefficient(sa.channel, sb.channel, k);
                    if lam != 0.0 {
                        e -= lam * slater(&space, k, &rho, &rho);
                    }
                }
                two_body += wa * wb * e;
            } else if b == a && sa.occupation > 1 {
                let mut e = f0;
                for k in multipoles(sa.channel, sa.channel).filter(|&k| k > 0) {
                    let g = intra_shell_weight(sa.channel, k);
                    if g != 0.0 {
                        e -= g * slater(&space, k, &dens[a], &dens[a]);
                    }
                }
                two_body += 0.5 * wa * (wa - 1.0) * e;
            }
        }
    }

    let mut eig_shifted = 0.0;
    if !psi.shells.is_empty() {
        for (s, (eps, _)) in psi.shells.iter().zip(orbital_residuals(psi)?) {
            eig_shifted += s.occupation as f64 * eps;
        }
    }
    let shifted = one_body_shifted + two_body;
    Ok(EnergyBreakdown {
        total: shifted + n_el * rest,
        shifted,
        one_body: one_body_shifted + n_el * rest,
        one_body_shifted,
        direct,
        exchange: direct - two_body,
        eigenvalue_sum: eig_shifted + n_el * rest,
        eigenvalue_sum_shifted: eig_shifted,
    })
}
