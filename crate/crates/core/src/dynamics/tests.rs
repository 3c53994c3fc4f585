use core::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::coherent_states::{ket_from_angles, projector_outer, DirectionAngles};
use crate::linalg::c64;
use crate::spin_algebra::{build_spin_operators, commutator, SpinLabel};

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    let z: f64 = rng.random_range(-1.0..=1.0);
    DirectionAngles::new(z.acos(), rng.random_range(0.0..TAU)).unwrap().unit_vector()
}

fn coherent(label: SpinLabel, n: &Vec3) -> QuantumState {
    let angles = DirectionAngles::from_vector(n).unwrap();
    QuantumState::new(projector_outer(&ket_from_angles(label, angles))).unwrap()
}

/// `Tr(rho S) / (hbar s)` computed straight from the matrices.
fn bloch(rho: &DensityMatrix, ops: &OperatorTriple) -> Vec3 {
    let scale = ops.hbar() * ops.label().s();
    let c = |m: &ComplexMatrix| (rho.matrix() * m).trace().re / scale;
    Vec3::new(c(ops.sx()), c(ops.sy()), c(ops.sz()))
}

fn max_classical_gap(a: &Trajectory, b: &Trajectory) -> f64 {
    assert_eq!(a.times(), b.times());
    a.samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x.classical.unwrap() - y.classical.unwrap()).norm())
        .fold(0.0, f64::max)
}

#[test]
fn schedule_validation() {
    assert!(FieldSchedule::new(alloc::vec![], 1.0).is_err());
    assert!(FieldSchedule::constant(Vec3::Z, 1.0, 0.0).is_err());
    assert!(FieldSchedule::constant(Vec3::Z, 1.0, -1.0).is_err());
    assert!(FieldSchedule::constant(Vec3::Z, f64::NAN, 1.0).is_err());
    assert!(FieldSchedule::constant(Vec3::new(f64::INFINITY, 0.0, 0.0), 1.0, 1.0).is_err());
    let s = FieldSchedule::new(
        alloc::vec![
            FieldSegment { duration: 0.5, field: Vec3::Z },
            FieldSegment { duration: 0.25, field: Vec3::X * 2.0 },
        ],
        -3.0,
    )
    .unwrap();
    assert_eq!(s.boundaries(), [0.5, 0.75]);
    assert_eq!(s.shortest_duration(), 0.25);
    assert!((s.shortest_period().unwrap() - TAU / 6.0).abs() < 1e-15);
}

#[test]
fn grid_hits_boundaries_and_samples() {
    let s = FieldSchedule::new(
        alloc::vec![
            FieldSegment { duration: 1.0, field: Vec3::Z },
            FieldSegment { duration: 0.35, field: Vec3::X },
        ],
        1.0,
    )
    .unwrap();
    let steps: alloc::vec::Vec<Step> = time_grid(&s, 0.1, 3).collect();
    assert_eq!(steps.len(), 10 + 4);
    assert_eq!(steps[9].t_end, 1.0);
    assert_eq!(steps[13].t_end, 1.35);
    assert!((steps[13].h - 0.05).abs() < 1e-15);
    let recorded: alloc::vec::Vec<f64> = steps.iter().filter(|s| s.record).map(|s| s.t_end).collect();
    // every third step plus both boundaries
    assert_eq!(recorded.len(), 4 + 1 + 1);
    assert_eq!(*recorded.last().unwrap(), 1.35);
    // 1 / 1e-4 must not produce a sliver step
    assert_eq!(FieldSchedule::constant(Vec3::Z, 1.0, 1.0).unwrap().step_count(1e-4), 10_000);
}

#[test]
fn zeeman_examples() {
    let ops = build_spin_operators(SpinLabel::HALF);
    assert_eq!(zeeman_hamiltonian(&Vec3::ZERO, 2.0, &ops).max_abs(), 0.0);
    assert_eq!(zeeman_hamiltonian(&Vec3::new(0.3, 1.0, 2.0), 0.0, &ops).max_abs(), 0.0);
    let (gamma, b) = (1.7, 0.9);
    let h = zeeman_hamiltonian(&(Vec3::Z * b), gamma, &ops);
    let want = ComplexMatrix::diagonal(&[c64(-gamma * b / 2.0, 0.0), c64(gamma * b / 2.0, 0.0)]);
    assert!(h.max_abs_diff(&want).unwrap() < 1e-16);
    let e = eigh(&h).unwrap();
    assert!((e.values[0] + gamma * b / 2.0).abs() < 1e-15);
    assert!((e.values[1] - gamma * b / 2.0).abs() < 1e-15);
    assert!(h.hermitian_residual() == 0.0);
}

#[test]
fn rhs_examples() {
    let n = ClassicalState::new(Vec3::X).unwrap();
    let (gamma, b) = (2.0, 3.0);
    assert_eq!(classical_rhs(&n, &(Vec3::X * 4.0), gamma), Vec3::ZERO);
    assert_eq!(classical_rhs(&n, &(Vec3::Z * b), gamma), Vec3::new(0.0, -gamma * b, 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for _ in 0..1000 {
        let n = ClassicalState::new(random_unit(&mut rng)).unwrap();
        let field = random_unit(&mut rng) * rng.random_range(0.0..5.0);
        let g = rng.random_range(-3.0..3.0);
        assert!(classical_rhs(&n, &field, g).dot(&n.direction()).abs() <= 1e-14);
    }
}

#[test]
fn exact_rotation_examples() {
    let n0 = ClassicalState::new(Vec3::X).unwrap();
    assert_eq!(exact_classical_rotation(&n0, &Vec3::Z, 2.0, 0.0), n0);
    assert_eq!(exact_classical_rotation(&n0, &Vec3::ZERO, 2.0, 17.0), n0);
    let (gamma, b) = (1.3, 0.8);
    let w = gamma * b;
    for t in [0.1, 1.0, 7.5] {
        let n = exact_classical_rotation(&n0, &(Vec3::Z * b), gamma, t).direction();
        let want = Vec3::new((w * t).cos(), -(w * t).sin(), 0.0);
        assert!((n - want).max_abs() < 1e-14);
    }
}

#[test]
fn exact_rotation_solves_the_ode() {
    // Sixth-order central difference of the closed form against the rhs.
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let h = 1e-2;
    for _ in 0..50 {
        let n0 = ClassicalState::new(random_unit(&mut rng)).unwrap();
        let field = random_unit(&mut rng) * rng.random_range(0.2..1.0);
        let gamma = rng.random_range(-1.0..1.0);
        let t = rng.random_range(0.0..10.0);
        let at = |dt: f64| exact_classical_rotation(&n0, &field, gamma, t + dt).direction();
        let deriv = (at(3.0 * h) - at(-3.0 * h) + (at(-2.0 * h) - at(2.0 * h)) * 9.0 + (at(h) - at(-h)) * 45.0)
            * (1.0 / (60.0 * h));
        let rhs = classical_rhs(&ClassicalState::new(at(0.0)).unwrap(), &field, gamma);
        assert!((deriv - rhs).norm() <= 1e-12, "{:e}", (deriv - rhs).norm());
    }
}

#[test]
fn rk4_tracks_exact_rotation() {
    let (gamma, b) = (TAU, 1.0);
    let period = 1.0;
    let schedule = FieldSchedule::constant(Vec3::new(0.3, -0.2, 1.0).normalized().unwrap() * b, gamma, 10.0 * period).unwrap();
    let n0 = ClassicalState::new(Vec3::new(1.0, 0.5, -0.2).normalized().unwrap()).unwrap();
    let dt = period / 1000.0;
    let rk = integrate_classical(&n0, &schedule, dt, 10).unwrap();
    let exact = exact_classical_trajectory(&n0, &schedule, dt, 10).unwrap();
    assert!(max_classical_gap(&rk, &exact) <= 1e-9);
    for s in rk.samples() {
        assert!((s.classical.unwrap().norm() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn rk4_is_fourth_order() {
    let schedule = FieldSchedule::constant(Vec3::Z, TAU, 2.0).unwrap();
    let n0 = ClassicalState::new(Vec3::new(1.0, 0.0, 1.0).normalized().unwrap()).unwrap();
    let errors: alloc::vec::Vec<f64> = [1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0]
        .iter()
        .map(|&dt| {
            let rk = integrate_classical(&n0, &schedule, dt, 1).unwrap();
            let exact = exact_classical_trajectory(&n0, &schedule, dt, 1).unwrap();
            max_classical_gap(&rk, &exact)
        })
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((14.0..=18.0).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn zero_gamma_freezes_classical_state() {
    let schedule = FieldSchedule::constant(Vec3::new(1.0, 2.0, 3.0), 0.0, 1.0).unwrap();
    let n0 = ClassicalState::new(Vec3::Y).unwrap();
    let tr = integrate_classical(&n0, &schedule, 0.01, 7).unwrap();
    assert!(tr.samples().iter().all(|s| s.classical == Some(Vec3::Y)));
    let generic = Vec3::new(0.3, -0.7, 0.2).normalized().unwrap();
    let tr = integrate_classical(&ClassicalState::new(generic).unwrap(), &schedule, 0.01, 1).unwrap();
    assert!(tr.samples().iter().all(|s| s.classical == Some(generic)));
}

#[test]
fn invalid_steps_rejected() {
    let schedule = FieldSchedule::constant(Vec3::Z, 1.0, 1.0).unwrap();
    let n0 = ClassicalState::new(Vec3::X).unwrap();
    for dt in [0.0, -1.0, f64::NAN, 2.0] {
        assert!(matches!(integrate_classical(&n0, &schedule, dt, 1), Err(Error::InvalidTimeStep(_))));
    }
    assert!(integrate_classical(&n0, &schedule, 0.1, 0).is_err());
    assert!(ClassicalState::new(Vec3::new(1.0, 1.0, 0.0)).is_err());
}

#[test]
fn propagator_examples() {
    let ops = build_spin_operators(SpinLabel::new(3));
    let h = zeeman_hamiltonian(&Vec3::new(0.2, 0.4, -1.0), 1.5, &ops);
    let id = ComplexMatrix::identity(4);
    assert!(propagator(&h, 0.0, 1.0).unwrap().max_abs_diff(&id).unwrap() < 1e-15);
    assert!(propagator(&ComplexMatrix::zeros(4), 3.0, 1.0).unwrap().max_abs_diff(&id).unwrap() < 1e-15);

    let half = build_spin_operators(SpinLabel::HALF);
    let (gamma, b) = (2.0, 1.5);
    let h = zeeman_hamiltonian(&(Vec3::Z * b), gamma, &half);
    let u = propagator(&h, TAU / (gamma * b), 1.0).unwrap();
    // spin-1/2 after a full turn: -I
    assert!(u.max_abs_diff(&ComplexMatrix::identity(2).scale_real(-1.0)).unwrap() < 1e-14);

    let skew = ComplexMatrix::from_row_major(alloc::vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]).unwrap();
    assert!(matches!(propagator(&skew, 1.0, 1.0), Err(Error::NotHermitian { .. })));
}

#[test]
fn propagators_are_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for twice_s in 1..=12 {
        let ops = build_spin_operators(SpinLabel::new(twice_s));
        for _ in 0..5 {
            let h = zeeman_hamiltonian(&(random_unit(&mut rng) * rng.random_range(0.1..10.0)), rng.random_range(-5.0..5.0), &ops);
            let u = propagator(&h, rng.random_range(0.0..3.0), 1.0).unwrap();
            let uu = &u.adjoint() * &u;
            assert!(uu.max_abs_diff(&ComplexMatrix::identity(ops.dim())).unwrap() <= 1e-12);
        }
    }
}

#[test]
fn stationary_when_field_parallel_to_state() {
    let ops = build_spin_operators(SpinLabel::new(4));
    let n = Vec3::new(0.3, -0.4, 0.5).normalized().unwrap();
    let rho0 = coherent(ops.label(), &n);
    let schedule = FieldSchedule::constant(n * 2.0, 3.0, 5.0).unwrap();
    let tr = evolve_density(&rho0, &schedule, 0.01, 25, &ops).unwrap();
    for s in tr.samples() {
        assert!(s.quantum.as_ref().unwrap().matrix().max_abs_diff(rho0.rho().matrix()).unwrap() <= 1e-12);
    }
}

#[test]
fn spin_half_precesses_like_the_classical_vector() {
    let ops = build_spin_operators(SpinLabel::HALF);
    let (gamma, b) = (TAU, 1.0);
    let w = gamma * b;
    let schedule = FieldSchedule::constant(Vec3::Z * b, gamma, 3.0).unwrap();
    let tr = evolve_density(&coherent(ops.label(), &Vec3::X), &schedule, 1e-3, 10, &ops).unwrap();
    for s in tr.samples() {
        let got = bloch(s.quantum.as_ref().unwrap(), &ops);
        let want = Vec3::new((w * s.t).cos(), -(w * s.t).sin(), 0.0);
        assert!((got - want).max_abs() <= 1e-10);
    }
}

#[test]
fn invariants_conserved_over_many_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let ops = build_spin_operators(SpinLabel::new(5));
    // a mixed state with a non-trivial spectrum
    let (a, b) = (random_unit(&mut rng), random_unit(&mut rng));
    let ra = projector_outer(&ket_from_angles(ops.label(), DirectionAngles::from_vector(&a).unwrap()));
    let rb = projector_outer(&ket_from_angles(ops.label(), DirectionAngles::from_vector(&b).unwrap()));
    let mixed = &ra.matrix().scale_real(0.35) + &rb.matrix().scale_real(0.65);
    let rho0 = QuantumState::new(DensityMatrix::new(mixed, ops.label()).unwrap()).unwrap();
    let schedule = FieldSchedule::new(
        alloc::vec![
            FieldSegment { duration: 0.5, field: random_unit(&mut rng) },
            FieldSegment { duration: 0.5, field: random_unit(&mut rng) * 2.0 },
        ],
        TAU,
    )
    .unwrap();
    let dt = 1e-4;
    assert!(schedule.step_count(dt) >= 10_000);
    let tr = evolve_density(&rho0, &schedule, dt, 1000, &ops).unwrap();
    let spec0 = rho0.rho().eigenvalues().unwrap();
    let purity0 = rho0.rho().purity();
    for s in tr.samples() {
        let rho = s.quantum.as_ref().unwrap();
        assert!((rho.trace() - c64(1.0, 0.0)).norm() <= 1e-10);
        assert!((rho.purity() - purity0).abs() <= 1e-10);
        for (x, y) in rho.eigenvalues().unwrap().iter().zip(&spec0) {
            assert!((x - y).abs() <= 1e-10);
        }
    }
}

#[test]
fn von_neumann_equation_holds_to_second_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let ops = build_spin_operators(SpinLabel::new(3));
    let field = random_unit(&mut rng) * 1.2;
    let gamma = 2.5;
    let h = zeeman_hamiltonian(&field, gamma, &ops);
    let rho0 = coherent(ops.label(), &random_unit(&mut rng));
    let at = |t: f64| {
        let u = propagator(&h, t, 1.0).unwrap();
        &(&u * rho0.rho().matrix()) * &u.adjoint()
    };
    for _ in 0..20 {
        let t = rng.random_range(0.0..5.0);
        let rho = at(t);
        let rhs = commutator(&h, &rho).unwrap().scale(c64(0.0, -1.0));
        let errors: alloc::vec::Vec<f64> = [0.02, 0.01, 0.005]
            .iter()
            .map(|&step| {
                let fd = (&at(t + step) - &at(t - step)).scale_real(0.5 / step);
                fd.max_abs_diff(&rhs).unwrap()
            })
            .collect();
        assert!(errors[0] / errors[1] >= 3.5 && errors[1] / errors[2] >= 3.5, "{errors:?}");
    }
}

#[test]
fn dimension_mismatch_rejected() {
    let ops = build_spin_operators(SpinLabel::ONE);
    let rho0 = coherent(SpinLabel::HALF, &Vec3::Z);
    let schedule = FieldSchedule::constant(Vec3::Z, 1.0, PI).unwrap();
    assert!(evolve_density(&rho0, &schedule, 0.1, 1, &ops).is_err());
}
