//! Parity bit extraction and bit-sequence utilities.

mod extract;
pub mod format;
mod metrics;

pub use extract::{build_x1, build_x2, parity_bit};
pub use metrics::{bias, information_density, throughput, ThroughputReport};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BitError {
    #[error("bit sequence is empty")]
    Empty,
    #[error("invalid bit value {value} at position {position}")]
    InvalidBit { position: usize, value: u8 },
    #[error("need at least {required} bits, got {actual}")]
    TooShort { required: usize, actual: usize },
    #[error("sequence of {bits} bits does not match a record of {samples} samples")]
    Mismatch { bits: usize, samples: usize },
    #[error("malformed bit file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BitError>;

/// Where a sequence came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub mode: String,
}

/// Non-empty ordered sequence of bits, one `u8` (0 or 1) per bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSequence {
    bits: Vec<u8>,
    label: String,
    source: Provenance,
}

impl BitSequence {
    pub fn new(bits: Vec<u8>, label: impl Into<String>) -> Result<Self> {
        if bits.is_empty() {
            return Err(BitError::Empty);
        }
        if let Some((position, &value)) = bits.iter().enumerate().find(|(_, &b)| b > 1) {
            return Err(BitError::InvalidBit { position, value });
        }
        Ok(Self {
            bits,
            label: label.into(),
            source: Provenance::default(),
        })
    }

    /// Parses a string of `'0'`/`'1'` characters.
    pub fn from_ascii(text: &str, label: impl Into<String>) -> Result<Self> {
        let bits = text
            .bytes()
            .enumerate()
            .map(|(position, c)| match c {
                b'0' => Ok(0),
                b'1' => Ok(1),
                value => Err(BitError::InvalidBit { position, value }),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(bits, label)
    }

    pub fn with_source(mut self, source: Provenance) -> Self {
        self.source = source;
        self
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn source(&self) -> &Provenance {
        &self.source
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| 1 - b).collect(),
            label: format!("{}~", self.label),
            source: self.source.clone(),
        }
    }

    pub fn to_ascii(&self) -> String {
        self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }
}
