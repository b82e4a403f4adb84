mod common;

use common::*;
use dfatoms::dirac_fock::*;
use dfatoms::radial::{Channel, NuclearModel, RadialGrid};
use dfatoms::Error;

fn check_bounds(rep: &ScfReport) {
    let psi = &rep.configuration;
    let c2 = psi.rest_energy();
    let n = psi.electron_count() as f64;
    for i in 0..psi.shells.len() {
        let eps = psi.epsilon(i);
        assert!(eps > 0.0 && eps < c2, "shell {i}: ε = {eps}");
    }
    assert!(rep.energy.total > 0.0 && rep.energy.total < n * c2);
    assert!(rep.energy.shifted < 0.0);
    assert!(psi.gram_error() < 1e-10, "{}", psi.gram_error());
}

#[test]
fn helium_converges_within_bounds() {
    let rep = scf_solve(&helium(C, 400)).unwrap();
    assert!(rep.converged);
    check_bounds(&rep);
    assert!(rep.lambda_minus_residuals.iter().all(|r| *r < 1e-8));
    assert!((rep.energy.shifted + 2.86183).abs() < 1e-4);
}

#[test]
fn beryllium_and_neon_within_bounds() {
    for p in [beryllium(C, 400), neon(C, 400)] {
        let rep = scf_solve(&p).unwrap();
        assert!(rep.converged);
        check_bounds(&rep);
        assert!(rep.lambda_minus_residuals.iter().all(|r| *r < 1e-8), "{:?}", rep.lambda_minus_residuals);
        // shells come out in Aufbau order within each channel
        let psi = &rep.configuration;
        for (i, a) in psi.shells.iter().enumerate() {
            for b in &psi.shells[i + 1..] {
                if a.channel == b.channel {
                    assert!(a.binding < b.binding);
                }
            }
        }
    }
}

// second-order grid extrapolation towards the converged Dirac-Fock energies
// of the point-nucleus atoms
#[test]
fn grid_extrapolated_energies() {
    for (p, reference) in [(helium as fn(f64, usize) -> Problem, -2.8618133), (beryllium, -14.575892)] {
        let (mut h, mut e) = ([0.0; 3], [0.0; 3]);
        for (i, m) in [500, 1000, 2000].into_iter().enumerate() {
            let prob = p(C, m);
            h[i] = prob.grid.step();
            e[i] = scf_solve(&prob).unwrap().energy.shifted;
        }
        let e0 = richardson(h, e);
        assert!((e0 - reference).abs() < 2e-6, "{e0} vs {reference}");
    }
}

#[test]
fn energy_identities() {
    let rep = scf_solve(&beryllium(C, 300)).unwrap();
    let e = rep.energy;
    assert!((e.one_body_shifted + e.two_body() - e.shifted).abs() < 1e-12);
    // closed shells: E = Σ w ε - (J - K)
    assert!((e.eigenvalue_sum_shifted - e.two_body() - e.shifted).abs() < 1e-8);
    let again = df_energy(&rep.configuration).unwrap();
    assert_eq!(again, e);
}

#[test]
fn density_integrates_to_electron_count() {
    let rep = scf_solve(&beryllium(C, 300)).unwrap();
    let rho = radial_density(&rep.configuration);
    assert!((rho.integral() - 4.0).abs() < 1e-10);
}

#[test]
fn orbital_residuals_vanish_at_convergence() {
    let rep = scf_solve(&helium(C, 300)).unwrap();
    for (eps, r) in orbital_residuals(&rep.configuration).unwrap() {
        assert!(eps < 0.0);
        assert!(r < 1e-7, "{r}");
    }
}

#[test]
fn hydrogenic_single_electron_matches_closed_form() {
    for (z, kappa, n) in [(1.0, -1, 1), (10.0, 1, 2), (50.0, -2, 2)] {
        let p = dirac(z, C, 1000, 1e-6 / z, &[(n, kappa, 1)]);
        let rep = scf_solve(&p).unwrap();
        assert!(rep.converged);
        let exact = sommerfeld_shifted(z, kappa, n, C);
        assert!(((rep.energy.shifted - exact) / exact).abs() < 1e-4, "{z} {kappa} {n}");
        // no self-interaction for one electron
        assert!((rep.energy.direct - rep.energy.exchange).abs() < 1e-12);
    }
}

#[test]
fn lambda_minus_methods_agree() {
    let rep = scf_solve(&beryllium(C, 300)).unwrap();
    let a = lambda_minus_residual_by(&rep.configuration, ResidualMethod::Spectral).unwrap();
    let b = lambda_minus_residual_by(&rep.configuration, ResidualMethod::ResidualBound).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!(*x < 1e-8 && *y < 1e-8, "{x} {y}");
    }
}

#[test]
fn spectral_projectors_split_the_mean_field() {
    let rep = scf_solve(&helium(C, 200)).unwrap();
    let op = mean_field_matrix(&rep.configuration, Channel::dirac(-1).unwrap()).unwrap();
    let (plus, minus) = spectral_split(&op, 0.0).unwrap();
    assert_eq!(plus.rank + minus.rank, 400);
    assert_eq!(plus.rank, 200);
    assert!(plus.idempotency_error() < 1e-10);
    let x = &rep.configuration.shells[0].coords;
    let px = plus.apply(x);
    let miss: f64 = px.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    assert!(miss < 1e-8);
}

#[test]
fn restart_from_converged_orbitals() {
    let p = helium(C, 300);
    let first = scf_solve(&p).unwrap();
    let second = scf_from(&p, first.configuration.clone()).unwrap();
    assert!(second.iterations <= 2);
    assert!((second.energy.shifted - first.energy.shifted).abs() < 1e-10);
}

#[test]
fn rejects_invalid_problems() {
    let grid = RadialGrid::exponential(1e-5, 40.0, 100).unwrap();
    let build = |z: f64, shells: Vec<(u32, i32, usize)>| {
        Problem::new(
            NuclearModel::point(z).unwrap(),
            Hamiltonian::Dirac { c: C },
            grid.clone(),
            shells
                .into_iter()
                .map(|(n, k, w)| ShellSpec {
                    n,
                    channel: Channel::dirac(k).unwrap(),
                    occupation: w,
                })
                .collect(),
            ScfControls::default(),
        )
    };
    // N ≥ Z + 1
    assert!(matches!(build(1.0, vec![(1, -1, 2)]), Err(Error::Domain(_))));
    // open shell with more than one electron
    assert!(build(4.0, vec![(1, -1, 2), (2, -1, 1)]).is_err());
    // skipped level
    assert!(build(4.0, vec![(1, -1, 2), (3, -1, 2)]).is_err());
    // n ≤ l
    assert!(build(4.0, vec![(1, 1, 1)]).is_err());
    assert!(build(3.0, vec![(1, -1, 2)]).is_ok());
}

#[test]
fn unsupported_channels_are_reported() {
    assert!(check_supported(Channel::dirac(-1).unwrap()).is_ok());
    let far = Channel::dirac(2).unwrap();
    assert!(matches!(check_supported(far), Err(Error::UnsupportedChannel(_))));
}
