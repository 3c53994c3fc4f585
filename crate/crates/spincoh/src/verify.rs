//! Randomized check of every identity the library relies on, over all
//! spins up to a bound. Deterministic for a given seed.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use spincoh_core::spin_algebra::local_frame;
use spincoh_core::{
    build_spin_operators, cross_identity_residual, direction_from_density, ehrenfest_residual, evolve_density,
    expectation_spin, highest_weight_residuals, ket_from_angles, projector_outer, projector_polynomial, scaled_tolerance,
    spin_cross_field_residual, telescoping_residual, ComplexMatrix, DirectionAngles, FieldSchedule, OperatorTriple,
    QuantumState, SpinLabel, Vec3,
};

pub const SU2_RELATIONS: &str = "su2 relations";
pub const CROSS_PRODUCT_COMMUTATOR: &str = "cross-product commutator";
pub const TELESCOPING_COMMUTATOR: &str = "telescoping commutator";
pub const SPIN_FIELD_COMMUTATOR: &str = "spin-field commutator";
pub const PROJECTOR_EQUIVALENCE: &str = "projector equivalence";
pub const HIGHEST_WEIGHT: &str = "highest-weight";
pub const EXPECTATION_MAP: &str = "expectation map";
pub const ROUND_TRIP: &str = "round-trip";
pub const EHRENFEST: &str = "Ehrenfest";

const VECTOR_PAIRS: usize = 100;
const MATRIX_PAIRS: usize = 50;
const DIRECTIONS: usize = 200;
const ROUND_TRIPS: usize = 100;
/// Steps per precession period in the Ehrenfest check.
const EHRENFEST_STEPS: usize = 2000;

/// Worst case of one identity over every input tried.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResult {
    pub name: &'static str,
    /// Tolerance at `s <= 6`; larger spins scale it by `2s + 1`. The
    /// Ehrenfest residual is in units of `hbar gamma |B| 2s` and never scaled.
    pub tolerance: f64,
    pub worst_residual: f64,
    pub worst_input: String,
    pub violations: usize,
    pub first_violation: Option<String>,
    pub passed: bool,
}

impl IdentityResult {
    fn new(name: &'static str, tolerance: f64) -> Self {
        IdentityResult {
            name,
            tolerance,
            worst_residual: 0.0,
            worst_input: String::new(),
            violations: 0,
            first_violation: None,
            passed: true,
        }
    }

    fn record(&mut self, residual: f64, tolerance: f64, input: impl FnOnce() -> String) {
        let ok = residual <= tolerance;
        if !ok || residual > self.worst_residual || self.worst_input.is_empty() {
            let input = input();
            if !ok {
                self.violations += 1;
                self.passed = false;
                if self.first_violation.is_none() {
                    self.first_violation = Some(format!("{input}: residual {residual:e} > {tolerance:e}"));
                }
            }
            if residual > self.worst_residual || residual.is_nan() || self.worst_input.is_empty() {
                self.worst_residual = if residual.is_nan() { f64::INFINITY } else { residual.max(self.worst_residual) };
                self.worst_input = input;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub max_twice_s: u32,
    pub seed: u64,
    pub identities: Vec<IdentityResult>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &IdentityResult> {
        self.identities.iter().filter(|r| !r.passed)
    }
}

fn unit(rng: &mut ChaCha8Rng) -> Vec3 {
    angles(rng).unit_vector()
}

fn angles(rng: &mut ChaCha8Rng) -> DirectionAngles {
    let z: f64 = rng.random_range(-1.0..=1.0);
    DirectionAngles::new(z.acos(), rng.random_range(0.0..TAU)).expect("angles in range")
}

fn disc(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if z.norm_sqr() <= 1.0 {
            return z;
        }
    }
}

fn describe(v: &Vec3) -> String {
    format!("({}, {}, {})", v.x(), v.y(), v.z())
}

/// A failed computation counts as an infinite residual.
fn or_inf(r: spincoh_core::Result<f64>) -> f64 {
    r.unwrap_or(f64::INFINITY)
}

struct Checks {
    su2: IdentityResult,
    cross: IdentityResult,
    telescoping: IdentityResult,
    field: IdentityResult,
    projector: IdentityResult,
    highest: IdentityResult,
    expectation: IdentityResult,
    round_trip: IdentityResult,
    ehrenfest: IdentityResult,
}

impl Checks {
    fn new() -> Self {
        Checks {
            su2: IdentityResult::new(SU2_RELATIONS, 1e-12),
            cross: IdentityResult::new(CROSS_PRODUCT_COMMUTATOR, 1e-12),
            telescoping: IdentityResult::new(TELESCOPING_COMMUTATOR, 1e-10),
            field: IdentityResult::new(SPIN_FIELD_COMMUTATOR, 1e-12),
            projector: IdentityResult::new(PROJECTOR_EQUIVALENCE, 1e-10),
            highest: IdentityResult::new(HIGHEST_WEIGHT, 1e-12),
            expectation: IdentityResult::new(EXPECTATION_MAP, 1e-11),
            round_trip: IdentityResult::new(ROUND_TRIP, 1e-10),
            ehrenfest: IdentityResult::new(EHRENFEST, 1e-6),
        }
    }

    fn into_vec(self) -> Vec<IdentityResult> {
        vec![
            self.su2,
            self.cross,
            self.telescoping,
            self.field,
            self.projector,
            self.highest,
            self.expectation,
            self.round_trip,
            self.ehrenfest,
        ]
    }
}

fn check_spin(c: &mut Checks, ops: &OperatorTriple, rng: &mut ChaCha8Rng) {
    let label = ops.label();
    let tag = format!("twice_s={}", label.twice_s());
    let tol = |t: f64| scaled_tolerance(t, label);
    let hbar = ops.hbar();
    let s = label.s();

    c.su2.record(ops.su2_residual(), tol(1e-12), || format!("{tag}, commutators"));
    c.su2.record(ops.casimir_residual(), tol(1e-12), || format!("{tag}, Casimir"));
    c.su2.record(ops.hermiticity_residual(), tol(1e-14), || format!("{tag}, hermiticity"));

    for _ in 0..VECTOR_PAIRS {
        let (a, b) = (unit(rng), unit(rng));
        c.cross.record(cross_identity_residual(&a, &b, ops), tol(1e-12), || {
            format!("{tag}, a={}, b={}", describe(&a), describe(&b))
        });
    }
    for _ in 0..VECTOR_PAIRS {
        let field = unit(rng) * rng.random_range(0.0..2.0);
        c.field.record(spin_cross_field_residual(&field, ops), tol(1e-12), || format!("{tag}, B={}", describe(&field)));
    }

    for _ in 0..DIRECTIONS {
        let a = angles(rng);
        let n = a.unit_vector();
        let input = || format!("{tag}, theta={}, phi={}", a.theta(), a.phi());
        let ket = ket_from_angles(label, a);
        let outer = projector_outer(&ket);
        match projector_polynomial(ops, &n) {
            Ok(poly) => {
                c.projector.record(or_inf(poly.matrix().max_abs_diff(outer.matrix())), tol(1e-10), input);
                c.projector.record(poly.idempotency_residual(), tol(1e-11), input);
                c.projector.record((poly.trace() - 1.0).norm(), tol(1e-12), input);
            }
            Err(_) => c.projector.record(f64::INFINITY, tol(1e-10), input),
        }
        match highest_weight_residuals(&ket, ops) {
            Ok((eig, raised)) => {
                c.highest.record(eig, tol(1e-12), input);
                c.highest.record(raised / hbar, tol(1e-12), input);
            }
            Err(_) => c.highest.record(f64::INFINITY, tol(1e-12), input),
        }
        match (expectation_spin(&outer, ops), local_frame(&n)) {
            (Ok(e), Ok([e1, e2, _])) => {
                c.expectation.record((e - n * (hbar * s)).max_abs() / hbar, tol(1e-11), input);
                c.expectation.record(e.dot(&e1).abs().max(e.dot(&e2).abs()) / hbar, tol(1e-12), input);
            }
            _ => c.expectation.record(f64::INFINITY, tol(1e-11), input),
        }
    }

    for _ in 0..ROUND_TRIPS {
        let n = unit(rng);
        let back = projector_polynomial(ops, &n).and_then(|rho| direction_from_density(&rho, label, ops));
        let r = back.map(|d| (d.direction() - n).norm()).unwrap_or(f64::INFINITY);
        c.round_trip.record(r, tol(1e-10), || format!("{tag}, n={}", describe(&n)));
    }

    // One precession period at h = period / 2000. The residual scales with
    // |<S>| = hbar s, so it is reported in units of hbar gamma |B| 2s.
    let field = unit(rng);
    let n0 = angles(rng);
    let gamma = TAU;
    let unit_residual = hbar * gamma * field.norm() * label.twice_s() as f64;
    let input = || format!("{tag}, B={}, n0={}", describe(&field), describe(&n0.unit_vector()));
    let r = FieldSchedule::constant(field, gamma, 1.0).and_then(|schedule| {
        let rho0 = QuantumState::new(projector_outer(&ket_from_angles(label, n0)))?;
        let tr = evolve_density(&rho0, &schedule, 1.0 / EHRENFEST_STEPS as f64, 1, ops)?;
        ehrenfest_residual(&tr, &schedule, ops)
    });
    c.ehrenfest.record(or_inf(r) / unit_residual, 1e-6, input);
}

fn check_telescoping(c: &mut Checks, rng: &mut ChaCha8Rng) {
    for _ in 0..MATRIX_PAIRS {
        let dim = rng.random_range(1..=8usize);
        let k = rng.random_range(1..=6usize);
        let x = ComplexMatrix::from_fn(dim, |_, _| disc(rng));
        let h = ComplexMatrix::from_fn(dim, |_, _| disc(rng));
        c.telescoping.record(or_inf(telescoping_residual(&x, &h, k)), 1e-10, || format!("dim={dim}, k={k}"));
    }
}

/// Runs the suite for `twice_s = 1..=max_twice_s`, building operators with
/// `build`. Spin `s` draws from its own ChaCha stream so results do not
/// depend on `max_twice_s`.
pub fn run(max_twice_s: u32, seed: u64, build: impl Fn(SpinLabel) -> OperatorTriple) -> VerifyReport {
    let mut checks = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    check_telescoping(&mut checks, &mut rng);
    for twice_s in 1..=max_twice_s {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(twice_s));
        let ops = build(SpinLabel::new(twice_s));
        check_spin(&mut checks, &ops, &mut rng);
    }
    let identities = checks.into_vec();
    let passed = identities.iter().all(|r| r.passed);
    VerifyReport { max_twice_s, seed, identities, passed }
}

/// The standard construction.
pub fn standard(label: SpinLabel) -> OperatorTriple {
    build_spin_operators(label)
}

/// Standard operators with the sign of `S_y` flipped. Hermitian and with
/// the right spectra, but the commutation relations break.
pub fn flipped_sy(label: SpinLabel) -> OperatorTriple {
    let ops = build_spin_operators(label);
    OperatorTriple::from_parts(label, ops.hbar(), ops.sx().clone(), -ops.sy(), ops.sz().clone())
        .expect("same dimensions")
}
