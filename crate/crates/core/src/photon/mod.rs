//! Seeded Monte-Carlo source of coincidence counts.
//!
//! Each counting interval yields four 2-fold coincidence counts, one per
//! detector pair `AB, A'B, AB', A'B'`. Counts are independent Poisson draws
//! whose means follow from the joint detection probabilities of the state.
//! Settings are acquired block by block: all samples of one CHSH setting,
//! then the next, with no switching in between.

mod config;
pub mod io;
mod sampling;
mod tomography;

pub use config::{SamplingMode, SourceConfig, DEFAULT_SEED};
pub use sampling::{
    channel_means, run_chsh_acquisition, sample_interval, AcquisitionRecord, CoincidenceSample,
};
pub use tomography::{run_tomography_acquisition, TomographyRun, TOMOGRAPHY_BASES};

use thiserror::Error;

use crate::quantum::QuantumError;

#[derive(Debug, Error)]
pub enum PhotonError {
    #[error("invalid source configuration: {0}")]
    InvalidConfig(String),
    #[error("samples per setting must be at least 1")]
    NoSamples,
    #[error("tomography needs at least 100 target events (got {0})")]
    TooFewEvents(u64),
    #[error("setting index {index} out of range at sample {position}")]
    BadSettingIndex { index: u8, position: usize },
    #[error("samples are not in setting-block order at sample {0}")]
    BlockOrder(usize),
    #[error("empty acquisition record")]
    EmptyRecord,
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, PhotonError>;
