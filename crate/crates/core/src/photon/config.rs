use serde::{Deserialize, Serialize};

use super::{PhotonError, Result};

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 2020;

/// How interval counts are produced from their means.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// Independent Poisson draws.
    #[default]
    Poisson,
    /// Counts set to their rounded means; tomography returns exact
    /// expectations. Approximates infinite statistics at large rates.
    Expected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    /// Generated photon pairs per second.
    pub pair_rate: f64,
    pub eta_a: f64,
    pub eta_b: f64,
    /// Accidental coincidences per second, per detector-pair channel.
    pub accidental_rate: f64,
    /// Counting interval in seconds.
    pub tau: f64,
    /// Dead period between intervals in seconds.
    pub lag: f64,
    pub seed: u64,
    #[serde(default)]
    pub mode: SamplingMode,
}

impl Default for SourceConfig {
    /// 7500 detected pairs/s at 30% efficiency per arm, 0.2 s intervals
    /// with a 0.1 s lag, no accidentals.
    fn default() -> Self {
        Self {
            pair_rate: 7500.0 / (0.3 * 0.3),
            eta_a: 0.3,
            eta_b: 0.3,
            accidental_rate: 0.0,
            tau: 0.2,
            lag: 0.1,
            seed: DEFAULT_SEED,
            mode: SamplingMode::Poisson,
        }
    }
}

impl SourceConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(PhotonError::InvalidConfig(msg));
        if !(self.pair_rate.is_finite() && self.pair_rate >= 0.0) {
            return bad(format!("pair_rate must be finite and >= 0 (got {})", self.pair_rate));
        }
        for (name, eta) in [("eta_a", self.eta_a), ("eta_b", self.eta_b)] {
            if !(0.0..=1.0).contains(&eta) {
                return bad(format!("{name} must lie in [0, 1] (got {eta})"));
            }
        }
        if !(self.accidental_rate.is_finite() && self.accidental_rate >= 0.0) {
            return bad(format!(
                "accidental_rate must be finite and >= 0 (got {})",
                self.accidental_rate
            ));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return bad(format!("tau must be finite and > 0 (got {})", self.tau));
        }
        if !(self.lag.is_finite() && self.lag >= 0.0) {
            return bad(format!("lag must be finite and >= 0 (got {})", self.lag));
        }
        Ok(())
    }

    /// Detected pairs per second, `pair_rate * eta_a * eta_b`.
    pub fn detected_pair_rate(&self) -> f64 {
        self.pair_rate * self.eta_a * self.eta_b
    }

    /// Wall time per sample, `tau + lag`.
    pub fn cycle_time(&self) -> f64 {
        self.tau + self.lag
    }
}
