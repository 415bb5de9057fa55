//! Min-entropy lower bounds from state coherence and from CHSH violation.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{DensityMatrix, HH, VV};
use super::{QuantumError, Result};

/// `2 sqrt(2)`, the quantum maximum of S.
pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

const COHERENCE_SLACK: f64 = 1e-9;
const S_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMethod {
    Tomography,
    Chsh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinEntropyBound {
    /// Bits per coincidence event.
    pub per_event: f64,
    pub method: BoundMethod,
}

/// CHSH bound together with the total over `n_events` measurement rounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshEntropy {
    pub bound: MinEntropyBound,
    pub n_events: u64,
    pub total: f64,
}

/// Renormalized restriction of a state to span{|HH>, |VV>}.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceCoherence {
    pub rho_sub: Matrix2<Complex64>,
    /// Magnitude of the off-diagonal element of `rho_sub`.
    pub c: f64,
}

pub fn subspace_restrict(rho: &DensityMatrix) -> Result<SubspaceCoherence> {
    let weight = rho.get(HH, HH).re + rho.get(VV, VV).re;
    if !(weight > 0.0) {
        return Err(QuantumError::ZeroSubspaceWeight);
    }
    let rho_sub = Matrix2::new(
        rho.get(HH, HH),
        rho.get(HH, VV),
        rho.get(VV, HH),
        rho.get(VV, VV),
    )
    .unscale(weight);
    let c = rho_sub[(0, 1)].norm();
    Ok(SubspaceCoherence { rho_sub, c })
}

/// State-based bound `-log2((1 + sqrt(1 - 4C^2)) / 2)` for coherence `C`.
///
/// `C` slightly above 1/2 (by at most 1e-9, numerical residue of the
/// renormalization) is clamped to 1/2.
pub fn min_entropy_tomography(c: f64) -> Result<MinEntropyBound> {
    if !(c >= 0.0) || c > 0.5 + COHERENCE_SLACK {
        return Err(QuantumError::CoherenceOutOfRange(c));
    }
    let c = c.min(0.5);
    let root = (1.0 - 4.0 * c * c).max(0.0).sqrt();
    let per_event = -((1.0 + root) / 2.0).log2();
    Ok(MinEntropyBound {
        per_event: per_event.clamp(0.0, 1.0),
        method: BoundMethod::Tomography,
    })
}

/// CHSH-based bound `1 - log2(1 + sqrt(2 - S^2/4))` per event; zero for `S < 2`.
pub fn min_entropy_chsh(s: f64, n_events: u64) -> Result<ChshEntropy> {
    if !s.is_finite() {
        return Err(QuantumError::BadS(s));
    }
    if s > TSIRELSON + S_SLACK {
        return Err(QuantumError::AboveTsirelson(s));
    }
    let per_event = if s < 2.0 {
        0.0
    } else {
        let root = (2.0 - s * s / 4.0).max(0.0).sqrt();
        (1.0 - (1.0 + root).log2()).clamp(0.0, 1.0)
    };
    Ok(ChshEntropy {
        bound: MinEntropyBound {
            per_event,
            method: BoundMethod::Chsh,
        },
        n_events,
        total: per_event * n_events as f64,
    })
}
