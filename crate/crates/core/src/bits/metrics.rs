use serde::{Deserialize, Serialize};

use super::{BitError, BitSequence, Result};
use crate::photon::AcquisitionRecord;

/// `|p0 - 1/2|`.
pub fn bias(seq: &BitSequence) -> f64 {
    let zeros = seq.len() - seq.ones();
    (zeros as f64 / seq.len() as f64 - 0.5).abs()
}

/// Order-0 Shannon entropy of the sequence read as MSB-first bytes, in bits
/// per bit. A trailing partial byte is ignored.
pub fn information_density(seq: &BitSequence) -> Result<f64> {
    let n_bytes = seq.len() / 8;
    if n_bytes == 0 {
        return Err(BitError::TooShort { required: 8, actual: seq.len() });
    }
    let mut freq = [0u64; 256];
    for chunk in seq.bits().chunks_exact(8) {
        let byte = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        freq[byte] += 1;
    }
    let n = n_bytes as f64;
    let entropy: f64 = freq
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    Ok((entropy / 8.0).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputReport {
    pub n_samples: usize,
    pub tau: f64,
    pub lag: f64,
    pub bits_emitted: usize,
    /// Bits per second of simulated wall time.
    pub rate: f64,
    pub elapsed_seconds: f64,
}

impl ThroughputReport {
    pub fn new(n_samples: usize, tau: f64, lag: f64, bits_emitted: usize) -> Self {
        let elapsed_seconds = n_samples as f64 * (tau + lag);
        Self {
            n_samples,
            tau,
            lag,
            bits_emitted,
            rate: bits_emitted as f64 / elapsed_seconds,
            elapsed_seconds,
        }
    }
}

/// Bit rate of a sequence extracted from `record` (one or four bits per sample).
pub fn throughput(record: &AcquisitionRecord, seq: &BitSequence) -> Result<ThroughputReport> {
    let samples = record.len();
    if samples == 0 || (seq.len() != samples && seq.len() != 4 * samples) {
        return Err(BitError::Mismatch { bits: seq.len(), samples });
    }
    let cfg = record.config();
    Ok(ThroughputReport::new(samples, cfg.tau, cfg.lag, seq.len()))
}
