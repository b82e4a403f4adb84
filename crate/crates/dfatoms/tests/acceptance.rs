//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! A criterion marked as an expected failure prints `XFAIL` when it fails and
//! `XPASS` when it unexpectedly passes. The process exits non-zero on FAIL or
//! XPASS only.

mod common;

use std::time::Instant;

use common::*;
use dfatoms::dirac_fock::{
    df_energy, initial_guess, mean_field_matrix, scf_solve, spectral_projector, Configuration, Problem, Projector,
    ScfReport,
};
use dfatoms::fock_space::{maxmin_projector_iteration, minimize_fc_fixed_projector};
use dfatoms::io::oracle_sommerfeld_shifted;
use dfatoms::nonrel::limit_study;
use dfatoms::projector::{epsilon_closeness, free_positive_projector, maxmin_energy, MaxMinControls, PositiveProjectors};
use dfatoms::radial::*;

// tolerances as stated by the criteria
const ORACLE_REL: f64 = 1e-6;
const GRAM_TOL: f64 = 1e-10;
const LAMBDA_MINUS_TOL: f64 = 1e-8;
const SLOPE_ENERGY: (f64, f64) = (-2.0, 0.3);
const SLOPE_MULTIPLIER: (f64, f64) = (-2.0, 0.3);
const SLOPE_KINETIC_BALANCE: (f64, f64) = (-3.0, 0.3);
const HF_ORACLE_ABS: f64 = 5e-4;
const MAXMIN_REL_C: f64 = 1e-3;
const MAXMIN_REL_10C: f64 = 1e-4;
const FREE_EPSILON_TOL: f64 = 1e-10;
const IDEMPOTENCY_TOL: f64 = 1e-8;
const FOCK_SCF_REL: f64 = 1e-8;
const FIXED_POINT_DISTANCE: f64 = 1e-8;
const SUM_RULE_TOL: f64 = 1e-12;
const RADIAL_3D_REL: f64 = 1e-4;
const GRADIENT_REL: f64 = 1e-6;
const SQUARE_REL: f64 = 1e-6;

struct Outcome {
    id: &'static str,
    name: &'static str,
    pass: bool,
    expect_fail: bool,
    detail: String,
    seconds: f64,
}

/// Converged runs seen so far, for the bounds criterion.
#[derive(Default)]
struct Bounds {
    runs: usize,
    violations: Vec<String>,
}

impl Bounds {
    fn check(&mut self, label: &str, psi: &Configuration, total: f64) {
        self.runs += 1;
        let c = psi.problem.hamiltonian.c().expect("Dirac run");
        let c2 = c * c;
        let n = psi.electron_count() as f64;
        for i in 0..psi.shells.len() {
            let eps = psi.epsilon(i);
            if !(eps > 0.0 && eps < c2) {
                self.violations.push(format!("{label}: ε_{i} = {eps}"));
            }
        }
        if !(total > 0.0 && total < n * c2) {
            self.violations.push(format!("{label}: E = {total}"));
        }
        if psi.gram_error() >= GRAM_TOL {
            self.violations.push(format!("{label}: Gram error {}", psi.gram_error()));
        }
    }

    fn scf(&mut self, label: &str, r: &ScfReport) {
        if r.converged {
            self.check(label, &r.configuration, r.energy.total);
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn within(x: f64, (target, tol): (f64, f64)) -> bool {
    (x - target).abs() < tol
}

fn mean_field_projectors(psi: &Configuration) -> Vec<Projector> {
    psi.problem
        .occupied_channels()
        .into_iter()
        .map(|ch| spectral_projector(&mean_field_matrix(psi, ch).unwrap(), 0.0).unwrap())
        .collect()
}

fn free_projectors(p: &Problem) -> Vec<Projector> {
    let c = p.hamiltonian.c().unwrap();
    p.occupied_channels()
        .into_iter()
        .map(|ch| free_positive_projector(ch.factor_kappa(), c, &p.grid).unwrap())
        .collect()
}

fn linear_oracle(b: &mut Bounds) -> (bool, String) {
    let mut ok = true;
    let mut worst = 0.0_f64;
    for (z, kappa, n) in [(1.0, -1, 1), (20.0, -1, 1), (92.0, -1, 1), (92.0, -1, 2), (92.0, 1, 2)] {
        let oracle = oracle_sommerfeld_shifted(z, kappa, n, C).unwrap();
        // the library oracle against the closed form written here
        ok &= rel(oracle, sommerfeld_shifted(z, kappa, n, C)) < 1e-12;
        let (mut h, mut e) = ([0.0; 3], [0.0; 3]);
        for (i, m) in [1000, 2000, 4000].into_iter().enumerate() {
            let p = dirac(z, C, m, 1e-6 / z, &[(n, kappa, 1)]);
            let r = scf_solve(&p).unwrap();
            ok &= r.converged;
            b.scf(&format!("Z={z} κ={kappa} n={n} M={m}"), &r);
            h[i] = p.grid.step();
            e[i] = r.energy.shifted;
        }
        let d = rel(richardson(h, e), oracle);
        worst = worst.max(d);
        ok &= d < ORACLE_REL;
    }
    (ok, format!("worst relative error {worst:.2e} (tol {ORACLE_REL:.0e})"))
}

fn lambda_minus(b: &mut Bounds) -> (bool, String) {
    let mut worst = 0.0_f64;
    let mut ok = true;
    for (label, p) in [("He", helium(C, 400)), ("Be", beryllium(C, 400))] {
        let r = scf_solve(&p).unwrap();
        ok &= r.converged;
        b.scf(label, &r);
        worst = r.lambda_minus_residuals.iter().fold(worst, |m, v| m.max(*v));
    }
    ok &= worst < LAMBDA_MINUS_TOL;
    (ok, format!("max ‖Λ⁻ψ‖ = {worst:.2e} (tol {LAMBDA_MINUS_TOL:.0e})"))
}

fn nonrelativistic_limit() -> (bool, String) {
    let mut ok = true;
    let mut detail = Vec::new();
    for (label, p) in [("He", helium(C, 400)), ("Be", beryllium(C, 400))] {
        let t = limit_study(&p, &[1.0, 2.0, 4.0, 8.0]).unwrap();
        let gaps = t.energy_gaps();
        let cs: Vec<f64> = t.rows.iter().map(|r| r.c).collect();
        let se = slope(&cs, &gaps);
        ok &= gaps.windows(2).all(|w| w[1] < w[0]) && within(se, SLOPE_ENERGY);
        let mut sm = Vec::new();
        let mut sk = Vec::new();
        for k in 0..t.shells.len() {
            let m = slope(&cs, &t.multiplier_gaps(k));
            let kb: Vec<f64> = t.rows.iter().map(|r| r.kinetic_balance[k]).collect();
            let s = slope(&cs, &kb);
            ok &= within(m, SLOPE_MULTIPLIER) && within(s, SLOPE_KINETIC_BALANCE);
            sm.push(format!("{m:.3}"));
            sk.push(format!("{s:.3}"));
        }
        detail.push(format!("{label} energy {se:.3}, multipliers [{}], kinetic balance [{}]", sm.join(", "), sk.join(", ")));
        if label == "He" {
            let hf = dfatoms::nonrel::hf_scf(&dfatoms::nonrel::nonrelativistic_problem(&helium(C, 1000)).unwrap()).unwrap();
            let oracle = helium_sto_oracle();
            let d = (hf.energy.shifted - oracle).abs();
            ok &= d < HF_ORACLE_ABS;
            detail.push(format!("E_HF(He) {:.9} vs basis oracle {oracle:.9}", hf.energy.shifted));
        }
    }
    (ok, detail.join("; "))
}

fn projector_independence(b: &mut Bounds) -> (bool, String) {
    let mut ok = true;
    let mut detail = Vec::new();
    for (f, tol) in [(1.0, MAXMIN_REL_C), (10.0, MAXMIN_REL_10C)] {
        let p = helium(f * C, 80);
        let scf = scf_solve(&p).unwrap();
        b.scf(&format!("He {f}c M=80"), &scf);
        let e_scf = scf.energy.shifted;
        let mut es = Vec::new();
        for source in [PositiveProjectors::Free, PositiveProjectors::MeanField] {
            let r = maxmin_energy(&p, &source, MaxMinControls::default()).unwrap();
            ok &= r.converged;
            if let Some(psi) = &r.configuration {
                b.check(&format!("maxmin {f}c"), psi, r.e_outer);
            }
            ok &= rel(r.e_outer_shifted, e_scf) < tol;
            es.push(r.e_outer_shifted);
        }
        ok &= (es[0] - es[1]).abs() < tol * e_scf.abs();
        detail.push(format!(
            "{f}c: free {:.3e}, mean-field {:.3e} relative to SCF (tol {tol:.0e})",
            rel(es[0], e_scf),
            rel(es[1], e_scf)
        ));
    }
    (ok, detail.join("; "))
}

fn epsilon_close(b: &mut Bounds) -> (bool, String) {
    let g = RadialGrid::exponential(5e-5, 40.0, 200).unwrap();
    let mut ok = true;
    let mut free = 0.0_f64;
    for kappa in [-1, 1, -2] {
        free = free.max(epsilon_closeness(&free_positive_projector(kappa, C, &g).unwrap(), kappa, C, &g).unwrap());
    }
    ok &= free < FREE_EPSILON_TOL;
    let mut eps = Vec::new();
    for f in [1.0, 2.0, 4.0] {
        let r = scf_solve(&helium(f * C, 200)).unwrap();
        b.scf(&format!("He {f}c M=200"), &r);
        let op = mean_field_matrix(&r.configuration, Channel::dirac(-1).unwrap()).unwrap();
        let plus = spectral_projector(&op, 0.0).unwrap();
        eps.push(epsilon_closeness(&plus, -1, f * C, &r.configuration.problem.grid).unwrap());
    }
    ok &= eps.windows(2).all(|w| w[1] < w[0]);
    let eps: Vec<String> = eps.iter().map(|e| format!("{e:.3e}")).collect();
    (ok, format!("free ε = {free:.1e}; mean-field ε over c, 2c, 4c = [{}]", eps.join(", ")))
}

fn no_pair_minimizer(b: &mut Bounds) -> (bool, String) {
    let p = helium(C, 300);
    let scf = scf_solve(&p).unwrap();
    b.scf("He M=300", &scf);
    let mut ok = true;
    let mut detail = Vec::new();
    for (label, proj) in [("free", free_projectors(&p)), ("mean-field", mean_field_projectors(&scf.configuration))] {
        let r = minimize_fc_fixed_projector(&proj, &p).unwrap();
        let c = &r.certificate;
        ok &= r.converged && c.idempotency < IDEMPOTENCY_TOL && c.rank == 2 && (c.trace - 2.0).abs() < 1e-10;
        let mut line = format!("{label}: ‖γ²-γ‖ {:.1e}, rank {}, trace {:.12}", c.idempotency, c.rank, c.trace);
        if label == "mean-field" {
            let d = rel(r.energy, scf.energy.shifted);
            ok &= d < FOCK_SCF_REL;
            line.push_str(&format!(", F_c vs SCF {d:.1e}"));
        }
        detail.push(line);
    }
    (ok, detail.join("; "))
}

fn closed_shell_fixed_point(b: &mut Bounds) -> (bool, String) {
    let mut ok = true;
    let mut worst = 0.0_f64;
    for (label, p) in [
        ("He c", helium(C, 150)),
        ("He 10c", helium(10.0 * C, 150)),
        ("Be c", beryllium(C, 150)),
        ("Be 10c", beryllium(10.0 * C, 150)),
    ] {
        let r = maxmin_projector_iteration(&p, None).unwrap();
        ok &= r.converged;
        match &r.certificate {
            Some(c) => worst = worst.max(c.final_distance),
            None => ok = false,
        }
        if r.converged {
            b.check(label, &r.configuration, r.energy + p.electron_count() as f64 * p.hamiltonian.rest_energy());
        }
    }
    ok &= worst < FIXED_POINT_DISTANCE;
    (ok, format!("largest final subspace distance {worst:.1e} (tol {FIXED_POINT_DISTANCE:.0e})"))
}

fn j_pairs() -> Vec<(u32, u32, u32, u32)> {
    let mut out = Vec::new();
    for ja in (1..=7u32).step_by(2) {
        for jb in (1..=7u32).step_by(2) {
            for la in [(ja - 1) / 2, (ja + 1) / 2] {
                for lb in [(jb - 1) / 2, (jb + 1) / 2] {
                    out.push((ja, jb, la, lb));
                }
            }
        }
    }
    out
}

fn literal_sum_rule() -> (bool, String) {
    // Σ_k (2j_b+1) Λ^k over the coupling multipoles
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (ja, jb, la, lb) in j_pairs() {
        let s: f64 = (ja.abs_diff(jb) / 2..=(ja + jb) / 2)
            .map(|k| (jb + 1) as f64 * angular_weight(ja, jb, la, lb, k).unwrap().value)
            .sum();
        lo = lo.min(s);
        hi = hi.max(s);
    }
    let ok = (lo - 1.0).abs() < SUM_RULE_TOL && (hi - 1.0).abs() < SUM_RULE_TOL;
    (ok, format!("sum ranges over [{lo:.4}, {hi:.4}] for j ≤ 7/2, not 1"))
}

fn corrected_sum_rules() -> (bool, String) {
    let (mut all, mut parity) = (0.0_f64, 0.0_f64);
    for (ja, jb, la, lb) in j_pairs() {
        let mut s_all = 0.0;
        let mut s_par = 0.0;
        for k in ja.abs_diff(jb) / 2..=(ja + jb) / 2 {
            let w = wigner_3j(ja as i64, 2 * k as i64, jb as i64, 1, 0, -1);
            s_all += (2 * k + 1) as f64 * w * w;
            s_par += (2 * k + 1) as f64 * angular_weight(ja, jb, la, lb, k).unwrap().value;
        }
        all = all.max((s_all - 1.0).abs());
        parity = parity.max((s_par - 0.5).abs());
    }
    (
        all < SUM_RULE_TOL && parity < SUM_RULE_TOL,
        format!("Σ_k (2k+1)(3j)² = 1 to {all:.1e}; parity-allowed Σ_k (2k+1)Λ^k = 1/2 to {parity:.1e}"),
    )
}

fn radial_vs_3d(b: &mut Bounds) -> (bool, String) {
    let r = scf_solve(&helium(C, 400)).unwrap();
    b.scf("He M=400", &r);
    let e = df_energy(&r.configuration).unwrap();
    let (j3, k3) = two_body_3d(&r.configuration);
    let e3 = e.one_body_shifted + j3 - k3;
    let d = rel(e3, e.shifted);
    (d < RADIAL_3D_REL, format!("E - Nc² radial {:.9} vs 3D {e3:.9}, relative {d:.1e}", e.shifted))
}

fn structural_invariants() -> (bool, String) {
    let mut ok = true;

    // gradient of the energy against the mean-field operator
    let mut grad = 0.0_f64;
    for (z, shells) in [
        (2.0, vec![(1, -1, 2)]),
        (4.0, vec![(1, -1, 2), (2, -1, 2)]),
        (10.0, vec![(1, -1, 2), (2, -1, 2), (2, 1, 2), (2, -2, 4)]),
    ] {
        let p = dirac(z, C, 60, 1e-4 / z, &shells);
        let mut psi = initial_guess(&p).unwrap();
        for (s, shell) in psi.shells.iter_mut().enumerate() {
            for (i, x) in shell.coords.iter_mut().enumerate() {
                *x *= 1.0 + 0.03 * ((i * 7 + s * 3) as f64).sin();
            }
        }
        for a in 0..psi.shells.len() {
            let x = psi.shells[a].coords.clone();
            let d: Vec<f64> = x.iter().enumerate().map(|(i, v)| v.abs().max(1e-3) * ((i as f64) * 0.37).cos()).collect();
            let f = mean_field_matrix(&psi, psi.shells[a].channel).unwrap();
            let mut fx = vec![0.0; x.len()];
            f.apply_shifted(&x, &mut fx);
            let w = psi.shells[a].occupation as f64;
            let analytic = 2.0 * w * d.iter().zip(&fx).map(|(p, q)| p * q).sum::<f64>();
            let at = |t: f64| {
                let mut q = psi.clone();
                for (xi, di) in q.shells[a].coords.iter_mut().zip(&d) {
                    *xi += t * di;
                }
                df_energy(&q).unwrap().shifted
            };
            let t = 1e-4;
            let fd = (8.0 * (at(t) - at(-t)) - (at(2.0 * t) - at(-2.0 * t))) / (12.0 * t);
            grad = grad.max((fd - analytic).abs() / analytic.abs().max(1.0));
        }
    }
    ok &= grad < GRADIENT_REL;

    // square identity: lowest free levels against sqrt(c⁴ + c² λ(BᵀB))
    let mut square = 0.0_f64;
    for kappa in [-1, 1, -2] {
        let g = RadialGrid::exponential(1e-5, 30.0, 100).unwrap();
        let op = dirac_channel_matrix(&g, kappa, C, &vec![0.0; 100]).unwrap();
        let spec = diagonalize_channel(&op).unwrap();
        let pos: Vec<f64> = spec.values().iter().copied().filter(|v| *v > 0.0).collect();
        let bm = factor_matrix(&g, kappa);
        let btb = bm.t().dot(&bm);
        let rows: Vec<Vec<f64>> = btb.rows().into_iter().map(|r| r.to_vec()).collect();
        let (mut lam, _) = jacobi(&rows);
        lam.sort_by(f64::total_cmp);
        let c2 = C * C;
        for i in 0..10 {
            let e = (c2 * c2 + c2 * lam[i]).sqrt();
            square = square.max(rel(pos[i], e));
        }
    }
    ok &= square < SQUARE_REL;

    // no spurious in-gap levels for Z = 1 and 92
    let mut pollution = 0.0_f64;
    for (z, m, levels) in [(1.0, 600, 3u32), (92.0, 1200, 4)] {
        for kappa in [-1, 1, -2] {
            let g = RadialGrid::exponential(1e-6 / z, 40.0, m).unwrap();
            let v = nuclear_potential(&NuclearModel::point(z).unwrap(), &g);
            let op = dirac_channel_matrix(&g, kappa, C, &v).unwrap();
            let spec = diagonalize_channel(&op).unwrap();
            let c2 = C * C;
            let gap: Vec<f64> = spec.shifted_values.iter().copied().filter(|e| *e > -c2 && *e < 0.0).collect();
            let n0 = kappa.unsigned_abs() + u32::from(kappa > 0);
            let fit = if z < 10.0 { levels + 1 - n0 } else { levels };
            for k in 0..fit {
                let exact = sommerfeld_shifted(z, kappa, n0 + k, C);
                pollution = pollution.max(gap.get(k as usize).map_or(f64::INFINITY, |e| rel(*e, exact)));
            }
        }
    }
    ok &= pollution < 1e-3;

    (
        ok,
        format!("gradient {grad:.1e} (tol {GRADIENT_REL:.0e}); square identity {square:.1e} (tol {SQUARE_REL:.0e}); worst in-gap level {pollution:.1e}"),
    )
}

fn main() {
    let mut bounds = Bounds::default();
    let mut outcomes = Vec::new();
    let mut run = |id, name, expect_fail, f: &mut dyn FnMut() -> (bool, String)| {
        let t = Instant::now();
        let (pass, detail) = f();
        let o = Outcome {
            id,
            name,
            pass,
            expect_fail,
            detail,
            seconds: t.elapsed().as_secs_f64(),
        };
        println!("{}", line(&o));
        outcomes.push(o);
    };

    run("1", "linear oracle equivalence", false, &mut || linear_oracle(&mut bounds));
    run("3", "negative-projector residual", false, &mut || lambda_minus(&mut bounds));
    run("4", "nonrelativistic limit", false, &mut nonrelativistic_limit);
    run("5", "projector independence of the max-min energy", false, &mut || projector_independence(&mut bounds));
    run("6", "epsilon-closeness", false, &mut || epsilon_close(&mut bounds));
    run("7", "no-pair minimizer", false, &mut || no_pair_minimizer(&mut bounds));
    run("8", "closed-shell max-min fixed point", false, &mut || closed_shell_fixed_point(&mut bounds));
    run("9a", "3j sum rule as stated", true, &mut literal_sum_rule);
    run("9b", "3j sum rules, corrected", false, &mut corrected_sum_rules);
    run("9c", "radial vs 3D energy", false, &mut || radial_vs_3d(&mut bounds));
    run("10", "structural invariants", false, &mut structural_invariants);
    run("2", "bounds on every converged run", false, &mut || {
        let detail = if bounds.violations.is_empty() {
            format!("{} converged runs, no violations", bounds.runs)
        } else {
            format!("{} violations: {}", bounds.violations.len(), bounds.violations.join("; "))
        };
        (bounds.violations.is_empty() && bounds.runs > 0, detail)
    });

    let unexpected = outcomes.iter().filter(|o| o.pass == o.expect_fail).count();
    println!(
        "acceptance: {} criteria, {} as expected, {} unexpected",
        outcomes.len(),
        outcomes.len() - unexpected,
        unexpected
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}

fn line(o: &Outcome) -> String {
    let tag = match (o.pass, o.expect_fail) {
        (true, false) => "PASS",
        (false, false) => "FAIL",
        (false, true) => "XFAIL",
        (true, true) => "XPASS",
    };
    format!("{tag:5} criterion {:3} {}: {} [{:.1}s]", o.id, o.name, o.detail, o.seconds)
}
