//! Classical precession of a unit vector and unitary evolution of density
//! matrices under piecewise-constant magnetic fields.
//!
//! Both integrators walk the same time grid: each segment is cut into steps
//! of `dt`, the final step of a segment is shortened so the boundary is hit
//! exactly, and a sample is taken every `sample_every` steps plus at every
//! segment boundary. Sample times are therefore bit-identical between the
//! classical and quantum trajectories of one schedule.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::coherent_states::DensityMatrix;
use crate::linalg::{eigh, ComplexMatrix};
use crate::spin_algebra::{dot_operator, OperatorTriple};
use crate::{Error, Result, Vec3};

/// Unit-norm slack accepted for a classical direction.
pub const CLASSICAL_NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSegment {
    /// Seconds, strictly positive.
    pub duration: f64,
    /// Tesla.
    pub field: Vec3,
}

/// Piecewise-constant field `B(t)` and the gyromagnetic ratio (rad/(s T),
/// either sign).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSchedule {
    segments: Vec<FieldSegment>,
    gamma: f64,
}

impl FieldSchedule {
    pub fn new(segments: Vec<FieldSegment>, gamma: f64) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSchedule("no segments".into()));
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidSchedule(format!("gamma = {gamma} is not finite")));
        }
        for (i, seg) in segments.iter().enumerate() {
            if !(seg.duration > 0.0 && seg.duration.is_finite()) {
                return Err(Error::InvalidSchedule(format!(
                    "segment {i}: duration {} must be positive and finite",
                    seg.duration
                )));
            }
            if !seg.field.is_finite() {
                return Err(Error::InvalidSchedule(format!("segment {i}: field is not finite")));
            }
        }
        Ok(FieldSchedule { segments, gamma })
    }

    pub fn constant(field: Vec3, gamma: f64, duration: f64) -> Result<Self> {
        Self::new(alloc::vec![FieldSegment { duration, field }], gamma)
    }

    pub fn segments(&self) -> &[FieldSegment] {
        &self.segments
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn shortest_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).fold(f64::INFINITY, f64::min)
    }

    /// Segment end times, accumulated in order.
    pub fn boundaries(&self) -> Vec<f64> {
        self.segments
            .iter()
            .scan(0.0, |t, s| {
                *t += s.duration;
                Some(*t)
            })
            .collect()
    }

    /// Shortest `2 pi / |gamma B|` over segments with a non-zero field.
    pub fn shortest_period(&self) -> Option<f64> {
        self.segments
            .iter()
            .map(|s| (self.gamma * s.field.norm()).abs())
            .filter(|w| *w > 0.0)
            .map(|w| core::f64::consts::TAU / w)
            .reduce(f64::min)
    }

    /// Number of integration steps the grid for `dt` contains.
    pub fn step_count(&self, dt: f64) -> usize {
        self.segments.iter().map(|s| steps_in(s.duration, dt)).sum()
    }

    /// Rejects steps that are non-positive, longer than the shortest segment,
    /// or paired with `sample_every = 0`.
    pub fn check_step(&self, dt: f64, sample_every: usize) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidTimeStep(format!("dt = {dt} must be positive and finite")));
        }
        let shortest = self.shortest_duration();
        if dt > shortest {
            return Err(Error::InvalidTimeStep(format!(
                "dt = {dt} exceeds the shortest segment duration {shortest}"
            )));
        }
        if sample_every == 0 {
            return Err(Error::InvalidTimeStep("sample_every must be at least 1".into()));
        }
        Ok(())
    }
}

fn steps_in(duration: f64, dt: f64) -> usize {
    // The relative slack keeps 1 / 1e-4 from rounding up to 10001 steps.
    ((duration / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// One step of the shared time grid.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Step {
    pub segment: usize,
    pub h: f64,
    pub t_end: f64,
    pub record: bool,
    pub first_in_segment: bool,
}

pub(crate) fn time_grid(schedule: &FieldSchedule, dt: f64, sample_every: usize) -> impl Iterator<Item = Step> + '_ {
    let boundaries = schedule.boundaries();
    let mut counter = 0usize;
    schedule.segments.iter().enumerate().flat_map(move |(seg, s)| {
        let start = if seg == 0 { 0.0 } else { boundaries[seg - 1] };
        let end = boundaries[seg];
        let n = steps_in(s.duration, dt);
        (0..n).map(move |k| {
            let last = k + 1 == n;
            Step {
                segment: seg,
                h: if last { s.duration - (n - 1) as f64 * dt } else { dt },
                t_end: if last { end } else { start + (k + 1) as f64 * dt },
                record: last,
                first_in_segment: k == 0,
            }
        })
    })
    .map(move |mut step| {
        counter += 1;
        step.record |= counter.is_multiple_of(sample_every);
        step
    })
}

/// Unit direction of the classical spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState(Vec3);

impl ClassicalState {
    pub fn new(n: Vec3) -> Result<Self> {
        let norm = n.norm();
        if (norm - 1.0).abs() > CLASSICAL_NORM_TOLERANCE {
            return Err(Error::NotUnitVector { norm });
        }
        Ok(ClassicalState(n))
    }

    pub fn direction(&self) -> Vec3 {
        self.0
    }
}

/// A validated density matrix being evolved.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState(DensityMatrix);

impl QuantumState {
    pub fn new(rho: DensityMatrix) -> Result<Self> {
        rho.validate()?;
        Ok(QuantumState(rho))
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    /// Classical direction (or a convex mean of directions for ensembles).
    pub classical: Option<Vec3>,
    pub quantum: Option<DensityMatrix>,
}

/// Samples at strictly increasing times, starting at `t = 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    samples: Vec<Sample>,
}

impl Trajectory {
    pub fn from_samples(samples: Vec<Sample>) -> Result<Self> {
        if let Some(first) = samples.first() {
            if first.t != 0.0 {
                return Err(Error::TimeGridMismatch(format!("first sample at t = {}", first.t)));
            }
        }
        if samples.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::TimeGridMismatch("sample times are not strictly increasing".into()));
        }
        Ok(Trajectory { samples })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }
}

/// `H = -gamma B . S`.
pub fn zeeman_hamiltonian(field: &Vec3, gamma: f64, ops: &OperatorTriple) -> ComplexMatrix {
    dot_operator(field, ops).scale_real(-gamma)
}

/// `dn/dt = gamma n x B`.
pub fn classical_rhs(state: &ClassicalState, field: &Vec3, gamma: f64) -> Vec3 {
    state.0.cross(field) * gamma
}

/// Closed-form precession for a constant field: rotation about `B/|B|` by
/// `-gamma |B| t`, the sign that makes the derivative at `t = 0` equal to
/// [`classical_rhs`].
pub fn exact_classical_rotation(n0: &ClassicalState, field: &Vec3, gamma: f64, t: f64) -> ClassicalState {
    match field.normalized() {
        Some(axis) => ClassicalState(n0.0.rotated(&axis, -gamma * field.norm() * t)),
        None => *n0,
    }
}

fn rk4_step(n: Vec3, field: &Vec3, gamma: f64, h: f64) -> Vec3 {
    let f = |v: Vec3| v.cross(field) * gamma;
    let k1 = f(n);
    let k2 = f(n + k1 * (h / 2.0));
    let k3 = f(n + k2 * (h / 2.0));
    let k4 = f(n + k3 * h);
    let next = n + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    if next == n {
        return n;
    }
    next.normalized().unwrap_or(n)
}

/// Classic RK4 with renormalization onto the sphere after every step.
pub fn integrate_classical(
    n0: &ClassicalState,
    schedule: &FieldSchedule,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory> {
    schedule.check_step(dt, sample_every)?;
    let gamma = schedule.gamma();
    let mut n = n0.0;
    let mut samples = alloc::vec![Sample { t: 0.0, classical: Some(n), quantum: None }];
    for step in time_grid(schedule, dt, sample_every) {
        n = rk4_step(n, &schedule.segments[step.segment].field, gamma, step.h);
        if step.record {
            samples.push(Sample { t: step.t_end, classical: Some(n), quantum: None });
        }
    }
    Ok(Trajectory { samples })
}

/// Exact piecewise rotation sampled on the same grid as
/// [`integrate_classical`]. Within a segment every sample is rotated
/// directly from the segment's starting direction.
pub fn exact_classical_trajectory(
    n0: &ClassicalState,
    schedule: &FieldSchedule,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory> {
    schedule.check_step(dt, sample_every)?;
    let gamma = schedule.gamma();
    let boundaries = schedule.boundaries();
    let mut seg_start_state = *n0;
    let mut current = *n0;
    let mut samples = alloc::vec![Sample { t: 0.0, classical: Some(n0.0), quantum: None }];
    for step in time_grid(schedule, dt, sample_every) {
        if step.first_in_segment {
            seg_start_state = current;
        }
        let seg = &schedule.segments[step.segment];
        let start = if step.segment == 0 { 0.0 } else { boundaries[step.segment - 1] };
        let state = exact_classical_rotation(&seg_start_state, &seg.field, gamma, step.t_end - start);
        current = state;
        if step.record {
            samples.push(Sample { t: step.t_end, classical: Some(state.0), quantum: None });
        }
    }
    Ok(Trajectory { samples })
}

/// `exp(-i H dt / hbar)` through the Hermitian eigendecomposition of `H`.
pub fn propagator(h: &ComplexMatrix, dt: f64, hbar: f64) -> Result<ComplexMatrix> {
    let residual = h.hermitian_residual();
    if residual > 1e-12 * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    let e = eigh(h)?;
    Ok(e.reconstruct_with(|lambda| Complex64::from_polar(1.0, -lambda * dt / hbar)))
}

/// Steps `rho <- U rho U^dagger` with one fixed propagator per segment
/// (plus one for a shortened final step).
pub fn evolve_density(
    rho0: &QuantumState,
    schedule: &FieldSchedule,
    dt: f64,
    sample_every: usize,
    ops: &OperatorTriple,
) -> Result<Trajectory> {
    schedule.check_step(dt, sample_every)?;
    let rho_start = rho0.rho();
    if rho_start.label() != ops.label() {
        return Err(Error::DimensionMismatch { expected: ops.dim(), found: rho_start.label().dim() });
    }
    let label = ops.label();
    let hbar = ops.hbar();
    let hamiltonians: Vec<ComplexMatrix> = schedule
        .segments
        .iter()
        .map(|s| zeeman_hamiltonian(&s.field, schedule.gamma(), ops))
        .collect();

    let mut rho = rho_start.matrix().clone();
    let mut samples = alloc::vec![Sample { t: 0.0, classical: None, quantum: Some(rho_start.clone()) }];
    let mut cached: Option<(usize, f64, ComplexMatrix, ComplexMatrix)> = None;
    for step in time_grid(schedule, dt, sample_every) {
        let fresh = match &cached {
            Some((seg, h, _, _)) => *seg != step.segment || h.to_bits() != step.h.to_bits(),
            None => true,
        };
        if fresh {
            let u = propagator(&hamiltonians[step.segment], step.h, hbar)?;
            let u_dag = u.adjoint();
            cached = Some((step.segment, step.h, u, u_dag));
        }
        let (_, _, u, u_dag) = cached.as_ref().expect("propagator cached");
        rho = &(u * &rho) * u_dag;
        if step.record {
            samples.push(Sample {
                t: step.t_end,
                classical: None,
                quantum: Some(DensityMatrix::from_matrix_unchecked(rho.clone(), label)?),
            });
        }
    }
    Ok(Trajectory { samples })
}

#[cfg(test)]
mod tests;
