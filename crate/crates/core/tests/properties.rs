mod common;

use std::f64::consts::TAU;

use common::*;
use proptest::prelude::*;
use stellar_zeros::dynamics::eig::eigenvalues;
use stellar_zeros::dynamics::tracking::{align, match_distance};
use stellar_zeros::dynamics::{closed_form, integrate, QuadraticHamiltonian, ZeroTrajectory};
use stellar_zeros::oracle::FockPropagator;
use stellar_zeros::phase::{detect_crossings, phase_shift_matrix, phase_trajectory, CrossingFlag};
use stellar_zeros::poly::{eval, from_roots, residual_bound, roots_polynomial};
use stellar_zeros::state::{
    energy_moment, normalize, phase_shift, random_stellar_state, stellar_to_fock, FockVector,
};
use stellar_zeros::wavefunction::{build_wavefunction, WavefunctionForm};
use stellar_zeros::C64;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| c(re, im))
}

fn fock_vector(max_len: usize) -> impl Strategy<Value = FockVector> {
    prop::collection::vec(complex(), 1..max_len)
        .prop_filter("nonzero", |v| v.iter().any(|z| z.norm() > 1e-3))
        .prop_map(|v| FockVector::new(v).unwrap())
}

fn close(a: &FockVector, b: &FockVector) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phase_shift_preserves_norm(v in fock_vector(40), theta in -10.0..10.0f64) {
        prop_assert!((phase_shift(&v, theta).norm() - v.norm()).abs() <= 1e-14 * v.norm().max(1.0));
    }

    #[test]
    fn phase_shifts_compose(v in fock_vector(40), t1 in -5.0..5.0f64, t2 in -5.0..5.0f64) {
        let a = phase_shift(&phase_shift(&v, t1), t2);
        let b = phase_shift(&v, t1 + t2);
        prop_assert!(close(&a, &b) <= 1e-14 * v.norm().max(1.0) * 40.0);
    }

    #[test]
    fn returned_roots_meet_residual_bound(roots in prop::collection::vec(complex(), 1..8), lead in complex()) {
        prop_assume!(lead.norm() > 1e-2);
        let p = from_roots(&roots.iter().map(|z| z * 3.0).collect::<Vec<_>>(), lead);
        let found = roots_polynomial(&p).unwrap();
        prop_assert_eq!(found.len(), roots.len());
        for z in found {
            prop_assert!(eval(&p, z).norm() <= residual_bound(&p, z));
        }
    }

    #[test]
    fn energy_partial_sum_grows_with_s(v in fock_vector(30), s in 1.001..3.0f64, ds in 0.0..2.0f64) {
        let a = energy_moment(&v, s, 1e-6).unwrap();
        let b = energy_moment(&v, s + ds, 1e-6).unwrap();
        prop_assert!(a.partial_sum >= 0.0);
        prop_assert!(b.partial_sum >= a.partial_sum);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fock_evolution_is_unitary(seed in 0u64..1000, t in 0.0..3.0f64) {
        let v = stellar_to_fock(&random_stellar_state(2, seed, 0.3), 80).unwrap();
        let w = FockPropagator::new(&gentle_hamiltonian(seed), 80).evolve(&v, t).unwrap();
        prop_assert!((w.norm() - v.norm()).abs() <= 1e-10);
    }

    #[test]
    fn fock_evolution_composes(seed in 0u64..1000, t1 in 0.0..1.5f64, t2 in 0.0..1.5f64) {
        let v = stellar_to_fock(&random_stellar_state(2, seed, 0.3), 80).unwrap();
        let prop = FockPropagator::new(&gentle_hamiltonian(seed), 80);
        let two_steps = prop.evolve(&prop.evolve(&v, t1).unwrap(), t2).unwrap();
        let one_step = prop.evolve(&v, t1 + t2).unwrap();
        prop_assert!(close(&two_steps, &one_step) <= 1e-8);
    }

    #[test]
    fn phase_matrix_agrees_with_general_closed_form(seed in 0u64..1000, rank in 1usize..5) {
        let wf = build_wavefunction(&random_stellar_state(rank, seed, 1.0)).unwrap();
        let h = QuadraticHamiltonian::phase_shift();
        for i in 0..64 {
            let t = TAU * i as f64 / 64.0;
            let m = phase_shift_matrix(wf.zeros(), wf.g2(), wf.g1(), t).unwrap();
            let d = match_distance(&eigenvalues(&m).unwrap(), &closed_form(&wf, &h, t).unwrap());
            prop_assert!(d <= 1e-10, "t={} d={}", t, d);
        }
    }

    #[test]
    fn evolution_keeps_rank(seed in 0u64..1000, rank in 0usize..5) {
        let wf = build_wavefunction(&random_stellar_state(rank, seed, 1.0)).unwrap();
        let grid = linspace(0.0, 2.0, 9);
        let traj = integrate(&wf, &stable_hamiltonian(seed), &grid).unwrap();
        for i in 0..grid.len() {
            prop_assert_eq!(traj.zeros_at(i).len(), rank);
        }
    }

    #[test]
    fn reversed_flow_returns_initial_zeros(seed in 0u64..1000, rank in 1usize..4) {
        let wf = build_wavefunction(&random_stellar_state(rank, seed, 1.0)).unwrap();
        let h = stable_hamiltonian(seed);
        let t = 1.2;
        let forward = integrate(&wf, &h, &[t]).unwrap();
        let mid = forward.form_at(0).unwrap();
        let back = integrate(&mid, &h.reversed(), &[t]).unwrap();
        prop_assert!(match_distance(&back.zeros_at(0), wf.zeros()) <= 1e-7);
    }
}

/// Fixture whose zeros keep clear of the real axis at every sample.
fn clean_form(seed: u64, rank: usize) -> Option<(WavefunctionForm, ZeroTrajectory)> {
    let wf = build_wavefunction(&random_stellar_state(rank, seed, 1.0)).ok()?;
    let traj = phase_trajectory(&wf, 512).ok()?;
    let grazing = traj.paths.iter().flatten().any(|z| z.im.abs() < 1e-6);
    (!grazing).then_some((wf, traj))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_zero_paths_cross_an_even_number_of_times(seed in 0u64..5000, rank in 1usize..4) {
        let Some((wf, traj)) = clean_form(seed, rank) else { return Ok(()) };
        let events = detect_crossings(&traj).unwrap();
        prop_assert!(events.iter().all(|e| e.flag == CrossingFlag::Crossing));
        // a tracked zero may end the period on another zero's start; only
        // paths that close on themselves carry the parity statement
        let ends: Vec<C64> = traj.paths.iter().map(|p| *p.last().unwrap()).collect();
        let landing = align(&ends, wf.zeros());
        for (k, (end, start)) in landing.iter().zip(wf.zeros()).enumerate() {
            if (end - start).norm() < 1e-6 {
                let n = events.iter().filter(|e| e.zero_index == k).count();
                prop_assert!(n % 2 == 0, "zero {} crossed {} times", k, n);
            }
        }
        prop_assert!(events.len().is_multiple_of(2));
    }
}

#[test]
fn normalize_then_shift_stays_unit() {
    let v = normalize(&FockVector::new(vec![c(1.0, 2.0), c(-0.5, 0.1), c(0.0, 3.0)]).unwrap()).unwrap();
    assert!((phase_shift(&v, 0.37).norm() - 1.0).abs() < 1e-15);
}
