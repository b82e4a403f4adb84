//! Nonrelativistic Hartree-Fock and the `c → ∞` limit of Dirac-Fock.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dirac_fock::{scf_solve, Configuration, Hamiltonian, Problem, ScfReport, ShellSpec};
use crate::error::{invalid, Error, Result};
use crate::linalg::dot;
use crate::radial::{apply_factor, Channel};

/// Closed-shell Hartree-Fock: the Dirac-Fock machinery with the Schrödinger
/// channel operator.
pub fn hf_scf(problem: &Problem) -> Result<ScfReport> {
    if problem.hamiltonian != Hamiltonian::Schrodinger {
        return Err(invalid("hf_scf needs a Schrödinger problem"));
    }
    scf_solve(problem)
}

/// Hartree-Fock problem on the same nucleus and grid. Relativistic shells
/// sharing `(n, ℓ)` merge into one nonrelativistic shell.
pub fn nonrelativistic_problem(problem: &Problem) -> Result<Problem> {
    let mut shells: Vec<ShellSpec> = Vec::new();
    for s in &problem.shells {
        let ch = match s.channel {
            Channel::Dirac(_) => s.channel.nonrelativistic_partner(),
            other => other,
        };
        match shells.iter_mut().find(|t| t.n == s.n && t.channel == ch) {
            Some(t) => t.occupation += s.occupation,
            None => shells.push(ShellSpec {
                n: s.n,
                channel: ch,
                occupation: s.occupation,
            }),
        }
    }
    Problem::new(
        problem.nuclear,
        Hamiltonian::Schrodinger,
        problem.grid.clone(),
        shells,
        problem.controls,
    )
}

/// For each relativistic shell, the index of its nonrelativistic partner.
pub fn shell_pairing(relativistic: &Problem, nonrelativistic: &Problem) -> Result<Vec<usize>> {
    relativistic
        .shells
        .iter()
        .map(|s| {
            let partner = s.channel.nonrelativistic_partner();
            nonrelativistic
                .shells
                .iter()
                .position(|t| t.n == s.n && t.channel == partner)
                .ok_or_else(|| invalid(format!("shell n={} {} has no nonrelativistic partner", s.n, s.channel)))
        })
        .collect()
}

/// `‖Q - (1/2c)(d/dr + κ/r)P‖` per shell.
///
/// With the sign convention of the channel matrix the leading small component
/// is `+BP/2c`, so this is the residual that vanishes like `c⁻³`.
pub fn kinetic_balance_residual(psi: &Configuration) -> Result<Vec<f64>> {
    let c = psi
        .problem
        .hamiltonian
        .c()
        .ok_or_else(|| invalid("kinetic balance needs a relativistic configuration"))?;
    let space = psi.space();
    Ok(psi
        .shells
        .iter()
        .map(|s| {
            let p = space.large_coordinates(&s.coords);
            let q = space.small_coordinates(&s.coords);
            let bp = apply_factor(space.grid(), s.channel.factor_kappa(), &p);
            q.iter().zip(&bp).map(|(q, b)| (q - b / (2.0 * c)).powi(2)).sum::<f64>().sqrt()
        })
        .collect())
}

/// `‖Q‖` per shell.
pub fn small_component_norms(psi: &Configuration) -> Vec<f64> {
    let space = psi.space();
    psi.shells
        .iter()
        .map(|s| {
            let q = space.small_coordinates(&s.coords);
            dot(&q, &q).sqrt()
        })
        .collect()
}

/// L² distance between the renormalized large component of a relativistic
/// shell and a nonrelativistic orbital on the same grid.
pub fn large_component_distance(relativistic: &[f64], nonrelativistic: &[f64], space_is_dirac: bool) -> f64 {
    let p: Vec<f64> = if space_is_dirac {
        relativistic.iter().step_by(2).copied().collect()
    } else {
        relativistic.to_vec()
    };
    let norm = dot(&p, &p).sqrt();
    let sign = if dot(&p, nonrelativistic) < 0.0 { -1.0 } else { 1.0 };
    p.iter()
        .zip(nonrelativistic)
        .map(|(a, b)| (sign * a / norm - b).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub factor: f64,
    pub c: f64,
    /// `E_DF - N c²`.
    pub energy_shifted: f64,
    /// `ε_k - c²` per relativistic shell.
    pub epsilons: Vec<f64>,
    pub kinetic_balance: Vec<f64>,
    pub small_norms: Vec<f64>,
    pub large_distances: Vec<f64>,
    pub iterations: usize,
}

/// Fitted log-log slopes against `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitSlopes {
    pub energy: f64,
    pub multipliers: Vec<f64>,
    pub kinetic_balance: Vec<f64>,
    pub small_norms: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitTable {
    pub shells: Vec<String>,
    pub hf_energy: f64,
    /// Hartree-Fock multiplier paired with each relativistic shell.
    pub hf_multipliers: Vec<f64>,
    pub rows: Vec<LimitRow>,
    pub slopes: LimitSlopes,
}

impl LimitTable {
    pub fn energy_gaps(&self) -> Vec<f64> {
        self.rows.iter().map(|r| (r.energy_shifted - self.hf_energy).abs()).collect()
    }

    /// `|ε_k - c² - λ̄_k|` for shell `k` along the rows.
    pub fn multiplier_gaps(&self, k: usize) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| (r.epsilons[k] - self.hf_multipliers[k]).abs())
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![
            "factor".to_string(),
            "c".into(),
            "energy_shifted".into(),
            "hf_energy".into(),
            "energy_gap".into(),
        ];
        for s in &self.shells {
            for col in ["epsilon", "hf_multiplier", "kinetic_balance", "small_norm", "large_distance"] {
                header.push(format!("{col}_{s}"));
            }
        }
        w.write_record(&header).map_err(csv_error)?;
        for r in &self.rows {
            let mut rec = vec![
                fmt17(r.factor),
                fmt17(r.c),
                fmt17(r.energy_shifted),
                fmt17(self.hf_energy),
                fmt17((r.energy_shifted - self.hf_energy).abs()),
            ];
            for k in 0..self.shells.len() {
                rec.push(fmt17(r.epsilons[k]));
                rec.push(fmt17(self.hf_multipliers[k]));
                rec.push(fmt17(r.kinetic_balance[k]));
                rec.push(fmt17(r.small_norms[k]));
                rec.push(fmt17(r.large_distances[k]));
            }
            w.write_record(&rec).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Runs Dirac-Fock at `c·factor` for each factor and Hartree-Fock once, on
/// the grid of `problem`, and tabulates the approach to the limit. Any
/// unconverged member run aborts the study.
pub fn limit_study(problem: &Problem, factors: &[f64]) -> Result<LimitTable> {
    let c0 = problem
        .hamiltonian
        .c()
        .ok_or_else(|| invalid("limit_study needs a relativistic problem"))?;
    if factors.is_empty() || factors.iter().any(|f| !(*f >= 1.0)) || factors.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(format!("c factors must be ≥ 1 and strictly ascending, got {factors:?}")));
    }
    let nr = nonrelativistic_problem(problem)?;
    let pairing = shell_pairing(problem, &nr)?;

    let (hf, runs) = std::thread::scope(|scope| {
        let hf = scope.spawn(|| hf_scf(&nr));
        let handles: Vec<_> = factors
            .iter()
            .map(|&f| {
                let p = problem.with_c(c0 * f);
                scope.spawn(move || p.and_then(|p| scf_solve(&p)))
            })
            .collect();
        let runs: Vec<Result<ScfReport>> = handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Eigen("member run panicked".into()))))
            .collect();
        let hf = hf.join().unwrap_or_else(|_| Err(Error::Eigen("Hartree-Fock run panicked".into())));
        (hf, runs)
    });
    let hf = hf?;
    if !hf.converged {
        return Err(Error::NotConverged {
            solver: "hf_scf",
            iterations: hf.iterations,
        });
    }
    let hf_multipliers: Vec<f64> = pairing.iter().map(|&j| hf.configuration.shells[j].binding).collect();

    let mut rows = Vec::with_capacity(factors.len());
    for (&f, run) in factors.iter().zip(runs) {
        let run = run?;
        if !run.converged {
            return Err(Error::NotConverged {
                solver: "scf_solve",
                iterations: run.iterations,
            });
        }
        let psi = &run.configuration;
        let large_distances = psi
            .shells
            .iter()
            .zip(&pairing)
            .map(|(s, &j)| large_component_distance(&s.coords, &hf.configuration.shells[j].coords, true))
            .collect();
        rows.push(LimitRow {
            factor: f,
            c: c0 * f,
            energy_shifted: run.energy.shifted,
            epsilons: psi.shells.iter().map(|s| s.binding).collect(),
            kinetic_balance: kinetic_balance_residual(psi)?,
            small_norms: small_component_norms(psi),
            large_distances,
            iterations: run.iterations,
        });
    }

    let cs: Vec<f64> = rows.iter().map(|r| r.c).collect();
    let nshell = problem.shells.len();
    let column = |get: &dyn Fn(&LimitRow) -> f64| -> Vec<f64> { rows.iter().map(get).collect() };
    let energy = loglog_slope(&cs, &column(&|r| (r.energy_shifted - hf.energy.shifted).abs()));
    let multipliers = (0..nshell)
        .map(|k| loglog_slope(&cs, &column(&|r| (r.epsilons[k] - hf_multipliers[k]).abs())))
        .collect();
    let kinetic_balance = (0..nshell)
        .map(|k| loglog_slope(&cs, &column(&|r| r.kinetic_balance[k])))
        .collect();
    let small_norms = (0..nshell)
        .map(|k| loglog_slope(&cs, &column(&|r| r.small_norms[k])))
        .collect();

    Ok(LimitTable {
        shells: problem
            .shells
            .iter()
            .map(|s| format!("{}{}", s.n, s.channel))
            .collect(),
        hf_energy: hf.energy.shifted,
        hf_multipliers,
        rows,
        slopes: LimitSlopes {
            energy,
            multipliers,
            kinetic_balance,
            small_norms,
        },
    })
}
