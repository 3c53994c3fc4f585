use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector is not unit length (|v| = {norm})")]
    NotUnitVector { norm: f64 },

    #[error("angle out of range: {0}")]
    AngleOutOfRange(String),

    #[error("telescoping power must be at least 1")]
    ZeroPower,

    #[error("matrix is not Hermitian (max |H - H^dagger| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("zero state vector")]
    ZeroVector,

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid time step: {0}")]
    InvalidTimeStep(String),

    #[error("invalid field schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("state is not coherent: {0}")]
    NotCoherent(String),

    #[error("trajectory time grids differ: {0}")]
    TimeGridMismatch(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("invalid ensemble weights: {0}")]
    InvalidWeights(String),

    #[error("trajectory is missing {0} samples")]
    MissingSamples(&'static str),
}
