//! The map between density matrices and classical directions, and the
//! checks that quantum and classical trajectories describe the same motion.

use alloc::format;
use alloc::vec::Vec;

use crate::coherent_states::{projector_polynomial, DensityMatrix};
use crate::dynamics::{ClassicalState, FieldSchedule, Trajectory};
use crate::spin_algebra::{OperatorTriple, SpinLabel};
use crate::{Error, Result, Vec3};

/// Largest imaginary part tolerated in `Tr(rho S_i)`, per unit of `hbar s`.
pub const IMAGINARY_TOLERANCE: f64 = 1e-12;

/// Idempotency slack for a density matrix to count as a pure projector.
pub const PURITY_TOLERANCE: f64 = 1e-9;

/// A pure state whose `|<S>| / (hbar s)` falls below `1 - NORM_SLACK` is
/// not coherent.
pub const NORM_SLACK: f64 = 1e-6;

/// Agreement between a classical and a quantum trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorrespondenceReport {
    pub max_direction_deviation: f64,
    /// Filled in from [`ehrenfest_residual`] when a schedule is at hand.
    pub max_ehrenfest_residual: Option<f64>,
    /// Worst `n -> projector -> direction` round trip over the classical
    /// samples that are unit vectors.
    pub round_trip_residual: Option<f64>,
    pub per_sample: Vec<f64>,
}

fn check_label(rho: &DensityMatrix, ops: &OperatorTriple) -> Result<()> {
    if rho.label() != ops.label() {
        return Err(Error::DimensionMismatch { expected: ops.dim(), found: rho.label().dim() });
    }
    Ok(())
}

/// `(Tr(rho S_x), Tr(rho S_y), Tr(rho S_z))`.
pub fn expectation_spin(rho: &DensityMatrix, ops: &OperatorTriple) -> Result<Vec3> {
    check_label(rho, ops)?;
    let scale = ops.hbar().abs() * ops.label().s().max(1.0);
    let mut out = [0.0; 3];
    for (slot, op) in out.iter_mut().zip(ops.components()) {
        // Tr(rho S) = sum_ij rho_ij S_ji
        let m = rho.matrix();
        let n = m.dim();
        let mut tr = num_complex::Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                tr += m[(i, j)] * op[(j, i)];
            }
        }
        if tr.im.abs() > IMAGINARY_TOLERANCE * scale {
            return Err(Error::InvalidDensity(format!("Tr(rho S) has imaginary part {:e}", tr.im)));
        }
        *slot = tr.re;
    }
    Ok(Vec3(out))
}

/// The classical direction `Tr(rho S) / (hbar s)` of a coherent projector.
pub fn direction_from_density(rho: &DensityMatrix, s: SpinLabel, ops: &OperatorTriple) -> Result<ClassicalState> {
    if s != ops.label() {
        return Err(Error::DimensionMismatch { expected: ops.dim(), found: s.dim() });
    }
    if s.twice_s() == 0 {
        return Err(Error::NotCoherent("spin 0 has no direction".into()));
    }
    let idem = rho.idempotency_residual();
    if idem > PURITY_TOLERANCE {
        return Err(Error::NotCoherent(format!("not a pure projector (|rho^2 - rho| = {idem:e})")));
    }
    let v = expectation_spin(rho, ops)? * (1.0 / (ops.hbar() * s.s()));
    let norm = v.norm();
    if !(1.0 - NORM_SLACK..=1.0 + NORM_SLACK).contains(&norm) {
        return Err(Error::NotCoherent(format!("|<S>| / (hbar s) = {norm}")));
    }
    ClassicalState::new(v * (1.0 / norm))
}

/// Per-sample distance between the classical vector and `Tr(rho S)/(hbar s)`.
pub fn verify_trajectory_correspondence(
    classical: &Trajectory,
    quantum: &Trajectory,
    s: SpinLabel,
    ops: &OperatorTriple,
) -> Result<CorrespondenceReport> {
    if s != ops.label() {
        return Err(Error::DimensionMismatch { expected: ops.dim(), found: s.dim() });
    }
    if classical.len() != quantum.len() {
        return Err(Error::TimeGridMismatch(format!(
            "{} classical vs {} quantum samples",
            classical.len(),
            quantum.len()
        )));
    }
    let scale = 1.0 / (ops.hbar() * s.s());
    let mut per_sample = Vec::with_capacity(classical.len());
    let mut round_trip: Option<f64> = None;
    for (c, q) in classical.samples().iter().zip(quantum.samples()) {
        if c.t.to_bits() != q.t.to_bits() {
            return Err(Error::TimeGridMismatch(format!("t = {} vs t = {}", c.t, q.t)));
        }
        let n = c.classical.ok_or(Error::MissingSamples("classical"))?;
        let rho = q.quantum.as_ref().ok_or(Error::MissingSamples("quantum"))?;
        let e = expectation_spin(rho, ops)? * scale;
        per_sample.push((n - e).norm());

        if (n.norm() - 1.0).abs() <= crate::spin_algebra::UNIT_NORM_TOLERANCE {
            let lifted = projector_polynomial(ops, &n)?;
            let back = direction_from_density(&lifted, s, ops)?.direction();
            let r = (back - n).norm();
            round_trip = Some(round_trip.map_or(r, |m| m.max(r)));
        }
    }
    Ok(CorrespondenceReport {
        max_direction_deviation: per_sample.iter().copied().fold(0.0, f64::max),
        max_ehrenfest_residual: None,
        round_trip_residual: round_trip,
        per_sample,
    })
}

/// Worst `|d<S>/dt - gamma <S> x B|` over interior samples, with the
/// derivative taken by a three-point central difference (second order on
/// non-uniform spacing). Samples on segment boundaries are never centers.
pub fn ehrenfest_residual(quantum: &Trajectory, schedule: &FieldSchedule, ops: &OperatorTriple) -> Result<f64> {
    let samples = quantum.samples();
    let mut spins = Vec::with_capacity(samples.len());
    for s in samples {
        let rho = s.quantum.as_ref().ok_or(Error::MissingSamples("quantum"))?;
        spins.push(expectation_spin(rho, ops)?);
    }
    let boundaries = schedule.boundaries();
    let gamma = schedule.gamma();
    let mut worst: f64 = 0.0;
    for (k, seg) in schedule.segments().iter().enumerate() {
        let start = if k == 0 { 0.0 } else { boundaries[k - 1] };
        let end = boundaries[k];
        let inside = |t: f64| t >= start && t <= end;
        let mut centers = 0usize;
        for i in 1..samples.len().saturating_sub(1) {
            let (t0, t1, t2) = (samples[i - 1].t, samples[i].t, samples[i + 1].t);
            if !(t1 > start && t1 < end && inside(t0) && inside(t2)) {
                continue;
            }
            centers += 1;
            let (h1, h2) = (t1 - t0, t2 - t1);
            let deriv = spins[i - 1] * (-h2 / (h1 * (h1 + h2)))
                + spins[i] * ((h2 - h1) / (h1 * h2))
                + spins[i + 1] * (h1 / (h2 * (h1 + h2)));
            let rhs = spins[i].cross(&seg.field) * gamma;
            worst = worst.max((deriv - rhs).norm());
        }
        if centers == 0 {
            return Err(Error::InsufficientSamples(format!(
                "segment {k} needs at least three samples (one strictly inside)"
            )));
        }
    }
    Ok(worst)
}
