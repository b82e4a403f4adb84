mod common;

use common::*;
use dfatoms::dirac_fock::{df_energy, mean_field_matrix, scf_solve, spectral_projector, Configuration, Projector};
use dfatoms::fock_space::*;
use dfatoms::projector::{free_positive_projector, FreeSpectrum};
use dfatoms::radial::Channel;
use dfatoms::Error;

fn mean_field_projectors(psi: &Configuration) -> Vec<Projector> {
    psi.problem
        .occupied_channels()
        .into_iter()
        .map(|ch| spectral_projector(&mean_field_matrix(psi, ch).unwrap(), 0.0).unwrap())
        .collect()
}

fn free_projectors(p: &dfatoms::dirac_fock::Problem, c: f64) -> Vec<Projector> {
    p.occupied_channels()
        .into_iter()
        .map(|ch| free_positive_projector(ch.factor_kappa(), c, &p.grid).unwrap())
        .collect()
}

#[test]
fn functional_agrees_with_orbital_energy() {
    for p in [helium(C, 300), beryllium(C, 300)] {
        let rep = scf_solve(&p).unwrap();
        let proj = mean_field_projectors(&rep.configuration);
        let gamma = DensityMatrix::from_configuration(&rep.configuration, proj).unwrap();
        let f = fc_energy(&gamma, &p).unwrap();
        let e = df_energy(&rep.configuration).unwrap().shifted;
        assert!((f - e).abs() < 1e-10 * e.abs(), "{f} vs {e}");
        assert!(gamma.idempotency_error() < 1e-14);
        assert_eq!(gamma.rank(), p.electron_count());
        assert!((gamma.trace() - p.electron_count() as f64).abs() < 1e-14);
    }
}

#[test]
fn minimizer_with_free_projector_is_no_pair() {
    let p = helium(C, 300);
    let res = minimize_fc_fixed_projector(&free_projectors(&p, C), &p).unwrap();
    assert!(res.converged);
    assert!(res.monotone);
    assert!(res.worst_violation < 1e-12);
    let cert = res.certificate;
    assert!(cert.idempotency < 1e-8);
    assert_eq!(cert.rank, 2);
    assert!((cert.trace - 2.0).abs() < 1e-10);
    assert!(cert.binding && cert.no_pair);
    assert!(cert.removal_increase > 0.0);
    assert!(res.history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    let scf = scf_solve(&p).unwrap().energy.shifted;
    assert!(((res.energy - scf) / scf).abs() < 1e-4);
}

#[test]
fn minimizer_with_mean_field_projector_reproduces_scf() {
    let p = beryllium(C, 300);
    let scf = scf_solve(&p).unwrap();
    let proj = mean_field_projectors(&scf.configuration);
    let res = minimize_fc_fixed_projector(&proj, &p).unwrap();
    assert!(res.converged);
    assert_eq!(res.certificate.rank, 4);
    let e = scf.energy.shifted;
    assert!(((res.energy - e) / e).abs() < 1e-8, "{} vs {e}", res.energy);
}

#[test]
fn single_electron_minimizer() {
    let p = dirac(1.0, C, 300, 1e-4, &[(1, -1, 1)]);
    let res = minimize_fc_fixed_projector(&free_projectors(&p, C), &p).unwrap();
    assert!(res.converged);
    assert!(res.gamma.single_electron);
    assert_eq!(res.certificate.rank, 1);
    assert!((res.energy + 0.5).abs() < 1e-3);
}

#[test]
fn constraint_violations_are_rejected() {
    let p = helium(C, 200);
    let rep = scf_solve(&p).unwrap();
    let proj = mean_field_projectors(&rep.configuration);
    let good = DensityMatrix::from_configuration(&rep.configuration, proj.clone()).unwrap();

    // occupation above one
    let mut over = good.clone();
    over.blocks[0].occupations[0] = 1.5;
    assert!(matches!(fc_energy(&over, &p), Err(Error::Constraint(_))));

    // a state from the negative spectral subspace
    let neg = FreeSpectrum::new(&p.grid, -1, C).unwrap().negative();
    let mut pair = good.clone();
    pair.blocks[0].orbitals[0] = neg.basis.column(0).to_vec();
    let why = match fc_energy(&pair, &p) {
        Err(Error::Constraint(m)) => m,
        other => panic!("expected a constraint error, got {other:?}"),
    };
    assert!(why.contains("P⁺"), "{why}");

    // zero and partial occupations are admissible
    let mut half = good.clone();
    half.blocks[0].occupations[0] = 0.5;
    assert!(fc_energy(&half, &p).is_ok());
    let empty = DensityMatrix::zero(proj);
    assert_eq!(fc_energy(&empty, &p).unwrap(), 0.0);
    assert_eq!(empty.trace(), 0.0);
}

#[test]
fn missing_channel_projector() {
    let p = beryllium(C, 100);
    let rep = scf_solve(&p).unwrap();
    let other = vec![free_positive_projector(1, C, &p.grid).unwrap()];
    assert!(DensityMatrix::from_configuration(&rep.configuration, other).is_err());
}

#[test]
fn projector_iteration_reaches_a_fixed_point() {
    for p in [helium(C, 150), helium(10.0 * C, 150), beryllium(C, 150)] {
        let rep = maxmin_projector_iteration(&p, None).unwrap();
        assert!(rep.converged && !rep.oscillating);
        let cert = rep.certificate.unwrap();
        assert!(cert.final_distance < 1e-8, "{}", cert.final_distance);
        let scf = scf_solve(&p).unwrap().energy.shifted;
        assert!(((rep.energy - scf) / scf).abs() < 1e-8);
        let ch = Channel::dirac(-1).unwrap();
        assert!(rep.configuration.shells.iter().all(|s| s.channel == ch));
    }
}

#[test]
fn projector_iteration_needs_dirac() {
    let nr = dfatoms::nonrel::nonrelativistic_problem(&helium(C, 100)).unwrap();
    assert!(maxmin_projector_iteration(&nr, None).is_err());
}

#[test]
fn open_shell_experiment_is_not_certified() {
    use dfatoms::dirac_fock::{Hamiltonian, Problem, ScfControls, ShellSpec};
    use dfatoms::radial::{NuclearModel, RadialGrid};
    let s = Channel::dirac(-1).unwrap();
    let shells = vec![
        ShellSpec { n: 1, channel: s, occupation: 2 },
        ShellSpec { n: 2, channel: s, occupation: 1 },
    ];
    let make = |shells: Vec<ShellSpec>| {
        Problem::open_shell(
            NuclearModel::point(3.0).unwrap(),
            Hamiltonian::Dirac { c: C },
            RadialGrid::exponential(1e-4 / 3.0, 40.0, 150).unwrap(),
            shells,
            ScfControls::default(),
        )
    };
    let li = make(shells.clone()).unwrap();
    assert!(li.has_open_shell());
    let rep = open_shell_experiment(&li).unwrap();
    println!(
        "Li: converged {} oscillating {} steps {} idempotency {:.3e} rank {} trace {}",
        rep.iteration.converged,
        rep.iteration.oscillating,
        rep.iteration.steps.len(),
        rep.no_pair.idempotency,
        rep.no_pair.rank,
        rep.no_pair.trace
    );
    assert!(!rep.certified);
    assert!(!rep.no_pair.no_pair);
    assert!((rep.no_pair.trace - 3.0).abs() < 1e-10);
    assert!(rep.no_pair.idempotency > 0.1);

    // the ordinary constructor refuses the open shell, and a closed problem
    // is not an experiment
    assert!(Problem::new(li.nuclear, li.hamiltonian, li.grid.clone(), shells, ScfControls::default()).is_err());
    assert!(open_shell_experiment(&helium(C, 100)).is_err());
    let two_open = vec![
        ShellSpec { n: 1, channel: s, occupation: 1 },
        ShellSpec { n: 2, channel: s, occupation: 1 },
    ];
    assert!(make(two_open).is_err());
}
