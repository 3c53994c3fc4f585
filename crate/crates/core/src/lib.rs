//! Spin-s coherent states and the classical/quantum precession correspondence.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs: operator construction for arbitrary spin,
//! coherent kets and their projectors, Majorana constellations, classical
//! precession of a unit vector and unitary evolution of density matrices,
//! plus the residual checks that tie the two pictures together.
//!
//! Conventions used throughout:
//!
//! * basis order is `m = +s, s-1, ..., -s`, so index 0 is the top state;
//! * operators carry the reduced Planck constant they were built with
//!   ([`OperatorTriple::hbar`]); the default is `1.0`;
//! * magnetic fields are in tesla, times in seconds, `gamma` in rad/(s T).

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod coherent_states;
pub mod correspondence;
pub mod dynamics;
mod error;
pub mod linalg;
pub mod mixtures;
pub mod spin_algebra;
mod vec3;

pub use coherent_states::{
    coherent_fit, highest_weight_residuals, ket_from_angles, majorana_constellation,
    polynomial_coefficients, projector_outer, projector_polynomial, CoherentKet, DensityMatrix,
    DirectionAngles, MajoranaConstellation, ProjectorPolynomial, DEFAULT_FIT_TOLERANCE,
};
pub use correspondence::{
    direction_from_density, ehrenfest_residual, expectation_spin,
    verify_trajectory_correspondence, CorrespondenceReport,
};
pub use dynamics::{
    classical_rhs, evolve_density, exact_classical_rotation, exact_classical_trajectory,
    integrate_classical, propagator, zeeman_hamiltonian, ClassicalState, FieldSchedule,
    FieldSegment, QuantumState, Sample, Trajectory,
};
pub use error::{Error, Result};
pub use linalg::{c64, ComplexMatrix};
pub use mixtures::{evolve_mixture, mix, CoherentEnsemble, EnsembleComponent};
pub use spin_algebra::{
    build_spin_operators, commutator, cross_identity_residual, dot_operator,
    local_ladder_operators, scaled_tolerance, spin_cross_field_residual, telescoping_residual,
    OperatorTriple, SpinLabel,
};
pub use vec3::Vec3;
