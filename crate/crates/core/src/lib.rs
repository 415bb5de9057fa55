//! Simulation and certification core for a parity-based optical quantum
//! random number generator.
//!
//! The crate is split into three layers:
//!
//! - [`quantum`]: exact two-photon polarization physics. Density matrices,
//!   joint detection probabilities, CHSH correlations, fidelity, Pauli
//!   tomography, and the two min-entropy lower bounds (state-coherence and
//!   CHSH based).
//! - [`photon`]: a seeded Monte-Carlo source of per-interval coincidence
//!   counts that follows a block-sequential CHSH acquisition schedule.
//! - [`bits`]: parity extraction of bit sequences from coincidence counts,
//!   together with bias, byte-entropy density, throughput and bit-file
//!   formats.
//!
//! Angles are given in degrees everywhere. The two-photon basis order is
//! fixed as `(HH, HV, VH, VV)`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bits;
pub mod photon;
pub mod quantum;

pub use bits::{BitSequence, Provenance};
pub use photon::{AcquisitionRecord, CoincidenceSample, SamplingMode, SourceConfig};
pub use quantum::{ChshSettings, DensityMatrix, MeasurementSetting};
