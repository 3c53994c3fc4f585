//! Runs one scenario through both the classical and the quantum route.

use serde::Serialize;
use spincoh_core::{
    evolve_density, evolve_mixture, expectation_spin, ehrenfest_residual, integrate_classical, ket_from_angles,
    projector_outer, verify_trajectory_correspondence, ClassicalState, CoherentEnsemble, Error, OperatorTriple,
    QuantumState, Sample, Trajectory, Vec3,
};

use crate::config::{Initial, Scenario, SCHEMA_VERSION};
use crate::error::CliError;

/// One line of `trajectory.csv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub t: f64,
    pub classical: Vec3,
    pub quantum: Vec3,
    pub deviation: f64,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveReport {
    pub schema_version: u32,
    pub twice_s: u32,
    pub hbar: f64,
    pub gamma: f64,
    pub dt_s: f64,
    pub sample_every: usize,
    pub samples: usize,
    pub tolerance: f64,
    pub max_direction_deviation: f64,
    pub max_ehrenfest_residual: Option<f64>,
    pub round_trip_residual: Option<f64>,
    /// Direct vs component-wise evolution, for ensembles only.
    pub mixture_linearity_residual: Option<f64>,
    pub passed: bool,
    pub per_sample_deviation: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub rows: Vec<Row>,
    pub report: EvolveReport,
}

fn runtime(e: Error) -> CliError {
    CliError::Failure(format!("evolution failed: {e}"))
}

/// Weighted mean of the component trajectories. All share one time grid.
fn mean_classical(parts: &[(f64, Trajectory)]) -> Result<Trajectory, CliError> {
    let first = &parts[0].1;
    let samples = (0..first.len())
        .map(|i| {
            let mut acc = Vec3::ZERO;
            for (w, tr) in parts {
                acc += tr.samples()[i].classical.expect("classical samples") * *w;
            }
            Sample { t: first.samples()[i].t, classical: Some(acc), quantum: None }
        })
        .collect();
    Trajectory::from_samples(samples).map_err(runtime)
}

fn max_gap(a: &Trajectory, b: &Trajectory) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for (x, y) in a.samples().iter().zip(b.samples()) {
        let (x, y) = (x.quantum.as_ref().expect("quantum"), y.quantum.as_ref().expect("quantum"));
        worst = worst.max(x.matrix().max_abs_diff(y.matrix()).map_err(runtime)?);
    }
    Ok(worst)
}

pub fn simulate(sc: &Scenario, ops: &OperatorTriple) -> Result<Evolution, CliError> {
    let (classical, quantum, linearity) = match &sc.initial {
        Initial::Direction(angles) => {
            let n0 = ClassicalState::new(angles.unit_vector()).map_err(runtime)?;
            let classical = integrate_classical(&n0, &sc.schedule, sc.dt, sc.sample_every).map_err(runtime)?;
            let rho0 = QuantumState::new(projector_outer(&ket_from_angles(sc.label, *angles))).map_err(runtime)?;
            let quantum = evolve_density(&rho0, &sc.schedule, sc.dt, sc.sample_every, ops).map_err(runtime)?;
            (classical, quantum, None)
        }
        Initial::Ensemble(components) => {
            let ensemble = CoherentEnsemble::new(sc.label, components.clone()).map_err(runtime)?;
            let mut parts = Vec::with_capacity(components.len());
            for c in components {
                let n0 = ClassicalState::new(c.angles.unit_vector()).map_err(runtime)?;
                parts.push((c.weight, integrate_classical(&n0, &sc.schedule, sc.dt, sc.sample_every).map_err(runtime)?));
            }
            let (direct, componentwise) =
                evolve_mixture(&ensemble, &sc.schedule, sc.dt, sc.sample_every, ops).map_err(runtime)?;
            let gap = max_gap(&direct, &componentwise)?;
            (mean_classical(&parts)?, direct, Some(gap))
        }
    };

    let mut report = verify_trajectory_correspondence(&classical, &quantum, sc.label, ops).map_err(runtime)?;
    report.max_ehrenfest_residual = match ehrenfest_residual(&quantum, &sc.schedule, ops) {
        Ok(r) => Some(r),
        Err(Error::InsufficientSamples(_)) => None,
        Err(e) => return Err(runtime(e)),
    };

    let scale = 1.0 / (ops.hbar() * sc.label.s());
    let mut rows = Vec::with_capacity(classical.len());
    for ((c, q), &deviation) in classical.samples().iter().zip(quantum.samples()).zip(&report.per_sample) {
        let e = expectation_spin(q.quantum.as_ref().expect("quantum"), ops).map_err(runtime)? * scale;
        rows.push(Row { t: c.t, classical: c.classical.expect("classical"), quantum: e, deviation });
    }

    let passed = report.max_direction_deviation <= sc.tolerance;
    Ok(Evolution {
        rows,
        report: EvolveReport {
            schema_version: SCHEMA_VERSION,
            twice_s: sc.label.twice_s(),
            hbar: sc.hbar,
            gamma: sc.schedule.gamma(),
            dt_s: sc.dt,
            sample_every: sc.sample_every,
            samples: classical.len(),
            tolerance: sc.tolerance,
            max_direction_deviation: report.max_direction_deviation,
            max_ehrenfest_residual: report.max_ehrenfest_residual,
            round_trip_residual: report.round_trip_residual,
            mixture_linearity_residual: linearity,
            passed,
            per_sample_deviation: report.per_sample,
        },
    })
}
