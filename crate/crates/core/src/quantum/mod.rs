//! Exact two-photon polarization computations.

mod chsh;
mod entropy;
mod fidelity;
mod measurement;
mod state;
mod tomography;

pub use chsh::{chsh_from_counts, chsh_from_samples, chsh_s, ChshResult, CHSH_SIGNS};
pub use entropy::{
    min_entropy_chsh, min_entropy_tomography, subspace_restrict, BoundMethod, ChshEntropy,
    MinEntropyBound, SubspaceCoherence, TSIRELSON,
};
pub use fidelity::fidelity;
pub use measurement::{correlation, joint_probs, ChshSettings, JointProbabilities, MeasurementSetting};
pub use state::{bell_phi_plus, werner, DensityMatrix, Matrix4c, HH, HV, VH, VV};
pub use tomography::{
    pauli, pauli_expectations, tomo_reconstruct, Pauli, PauliExpectations, Reconstruction,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("matrix contains a non-finite element")]
    NonFinite,
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("trace is not 1 (got {0})")]
    BadTrace(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("state vector has zero norm")]
    ZeroNorm,
    #[error("angle must be finite (got {0})")]
    BadAngle(f64),
    #[error("visibility must lie in [0, 1] (got {0})")]
    VisibilityOutOfRange(f64),
    #[error("state has no weight in the HH/VV subspace")]
    ZeroSubspaceWeight,
    #[error("coherence magnitude must lie in [0, 0.5] (got {0})")]
    CoherenceOutOfRange(f64),
    #[error("S = {0} exceeds the Tsirelson bound 2*sqrt(2)")]
    AboveTsirelson(f64),
    #[error("S must be finite (got {0})")]
    BadS(f64),
    #[error("identity expectation <II> must be 1 (got {0})")]
    BadNormalization(f64),
    #[error("Pauli expectation <{label}> = {value} lies outside [-1, 1]")]
    ExpectationOutOfRange { label: String, value: f64 },
    #[error("no samples for CHSH setting {0}")]
    MissingSetting(usize),
    #[error("CHSH setting {setting} has {count} samples; at least 2 are required")]
    TooFewSamples { setting: usize, count: usize },
    #[error("CHSH setting {0} has zero total coincidences")]
    ZeroCounts(usize),
}

pub type Result<T> = std::result::Result<T, QuantumError>;
