//! Convex mixtures of coherent-state projectors.

use alloc::format;
use alloc::vec::Vec;

use crate::coherent_states::{ket_from_angles, projector_outer, DensityMatrix, DirectionAngles};
use crate::dynamics::{evolve_density, FieldSchedule, QuantumState, Sample, Trajectory};
use crate::linalg::ComplexMatrix;
use crate::spin_algebra::{OperatorTriple, SpinLabel};
use crate::{Error, Result};

pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleComponent {
    pub weight: f64,
    pub angles: DirectionAngles,
}

/// One particular decomposition `rho = sum_i p_i |n_i><n_i|`. The same
/// mixed state has many others; this one is just the input.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentEnsemble {
    label: SpinLabel,
    components: Vec<EnsembleComponent>,
}

impl CoherentEnsemble {
    pub fn new(label: SpinLabel, components: Vec<EnsembleComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidWeights("ensemble is empty".into()));
        }
        for (i, c) in components.iter().enumerate() {
            if !(c.weight >= 0.0 && c.weight.is_finite()) {
                return Err(Error::InvalidWeights(format!("weight {i} = {} is negative or not finite", c.weight)));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
        }
        Ok(CoherentEnsemble { label, components })
    }

    pub fn label(&self) -> SpinLabel {
        self.label
    }

    pub fn components(&self) -> &[EnsembleComponent] {
        &self.components
    }
}

fn check_ops(ensemble: &CoherentEnsemble, ops: &OperatorTriple) -> Result<()> {
    if ensemble.label != ops.label() {
        return Err(Error::DimensionMismatch { expected: ops.dim(), found: ensemble.label.dim() });
    }
    Ok(())
}

/// `sum_i p_i |n_i><n_i|`, summed in input order.
pub fn mix(ensemble: &CoherentEnsemble, ops: &OperatorTriple) -> Result<DensityMatrix> {
    check_ops(ensemble, ops)?;
    let mut acc = ComplexMatrix::zeros(ops.dim());
    for c in &ensemble.components {
        let p = projector_outer(&ket_from_angles(ensemble.label, c.angles));
        acc = &acc + &p.matrix().scale_real(c.weight);
    }
    DensityMatrix::new(acc, ensemble.label)
}

/// Returns `(direct, componentwise)`: the mixed state evolved as a whole,
/// and the weighted sum of each component's own evolution.
pub fn evolve_mixture(
    ensemble: &CoherentEnsemble,
    schedule: &FieldSchedule,
    dt: f64,
    sample_every: usize,
    ops: &OperatorTriple,
) -> Result<(Trajectory, Trajectory)> {
    let rho0 = QuantumState::new(mix(ensemble, ops)?)?;
    let direct = evolve_density(&rho0, schedule, dt, sample_every, ops)?;

    let mut sums: Option<Vec<ComplexMatrix>> = None;
    for c in &ensemble.components {
        let pure = QuantumState::new(projector_outer(&ket_from_angles(ensemble.label, c.angles)))?;
        let tr = evolve_density(&pure, schedule, dt, sample_every, ops)?;
        let weighted = tr.samples().iter().map(|s| {
            s.quantum.as_ref().expect("quantum samples").matrix().scale_real(c.weight)
        });
        sums = Some(match sums {
            None => weighted.collect(),
            Some(acc) => acc.iter().zip(weighted).map(|(a, w)| a + &w).collect(),
        });
    }
    let samples = direct
        .samples()
        .iter()
        .zip(sums.expect("non-empty ensemble"))
        .map(|(d, m)| {
            Ok(Sample { t: d.t, classical: None, quantum: Some(DensityMatrix::from_matrix_unchecked(m, ensemble.label)?) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((direct, Trajectory::from_samples(samples)?))
}
