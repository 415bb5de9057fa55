//! Randomness tests for bit sequences.
//!
//! - [`borel`]: Borel normality over non-overlapping m-blocks.
//! - [`nist`]: eleven tests of NIST SP 800-22 (Linear Complexity and both
//!   Random Excursions tests are not included).
//! - [`batch`]: subsequence batteries with proportion and P-value uniformity.
//! - [`suite`]: report assembly for whole sequences.

pub mod batch;
pub mod borel;
pub mod nist;
mod special;
pub mod suite;

pub use batch::{batch_test, min_passing, proportion_threshold, uniformity_p, BatchVerdict};
pub use borel::{borel_bound, borel_normality, borel_statistic, m_max, BorelReport};
pub use nist::{run_statistical_test, run_test_bits, AppliedParams, TestId, TestParams, TestResult};
pub use suite::{run_suite, NistReport, NotApplicable, Scope, SuiteConfig};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TestError {
    #[error("{test} needs at least {required} bits, got {actual}")]
    InsufficientLength { test: &'static str, required: usize, actual: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("block length m = {m} outside 1..={m_max}")]
    BlockLengthOutOfRange { m: usize, m_max: usize },
    #[error("alpha {0} outside (0, 0.5)")]
    InvalidAlpha(f64),
}

pub type Result<T> = std::result::Result<T, TestError>;
