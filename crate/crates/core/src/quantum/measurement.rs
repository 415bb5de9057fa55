use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use super::state::DensityMatrix;
use super::{QuantumError, Result};

/// A pair of linear-polarization analyzer angles, in degrees.
///
/// Angles are normalized to `[0, 180)`: an analyzer at `theta` and at
/// `theta + 180` projects onto the same polarization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    theta_a: f64,
    theta_b: f64,
}

impl MeasurementSetting {
    pub fn new(theta_a_deg: f64, theta_b_deg: f64) -> Result<Self> {
        Ok(Self {
            theta_a: normalize_angle(theta_a_deg)?,
            theta_b: normalize_angle(theta_b_deg)?,
        })
    }

    pub fn theta_a(&self) -> f64 {
        self.theta_a
    }

    pub fn theta_b(&self) -> f64 {
        self.theta_b
    }
}

fn normalize_angle(deg: f64) -> Result<f64> {
    if !deg.is_finite() {
        return Err(QuantumError::BadAngle(deg));
    }
    let r = deg.rem_euclid(180.0);
    // rem_euclid can round up to exactly 180 for tiny negative inputs.
    Ok(if r >= 180.0 { 0.0 } else { r })
}

/// The four CHSH settings in the order
/// `(A1,B1), (A1,B2), (A2,B1), (A2,B2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    settings: [MeasurementSetting; 4],
}

impl ChshSettings {
    /// Build from the two angles per side.
    pub fn from_angles(a1: f64, a2: f64, b1: f64, b2: f64) -> Result<Self> {
        Ok(Self {
            settings: [
                MeasurementSetting::new(a1, b1)?,
                MeasurementSetting::new(a1, b2)?,
                MeasurementSetting::new(a2, b1)?,
                MeasurementSetting::new(a2, b2)?,
            ],
        })
    }

    pub fn from_settings(settings: [MeasurementSetting; 4]) -> Self {
        Self { settings }
    }

    pub fn settings(&self) -> &[MeasurementSetting; 4] {
        &self.settings
    }

    pub fn get(&self, index: usize) -> MeasurementSetting {
        self.settings[index]
    }
}

impl Default for ChshSettings {
    /// `A1 = 0, A2 = 45, B1 = +22.5, B2 = -22.5`: the angles that maximize
    /// S for `|Phi+>`.
    fn default() -> Self {
        Self::from_angles(0.0, 45.0, 22.5, -22.5).expect("canonical angles are finite")
    }
}

/// Probabilities of the four joint outcomes. `p` = transmitted arm (A or B),
/// `m` = reflected arm (A' or B').
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointProbabilities {
    pub p_pp: f64,
    pub p_pm: f64,
    pub p_mp: f64,
    pub p_mm: f64,
}

impl JointProbabilities {
    pub fn sum(&self) -> f64 {
        self.p_pp + self.p_pm + self.p_mp + self.p_mm
    }

    pub fn correlation(&self) -> f64 {
        self.p_pp + self.p_mm - self.p_pm - self.p_mp
    }
}

/// Analyzer eigenvectors: transmitted `cos|H> + sin|V>`, reflected `-sin|H> + cos|V>`.
fn analyzer(theta_deg: f64) -> ([f64; 2], [f64; 2]) {
    let (s, c) = theta_deg.to_radians().sin_cos();
    ([c, s], [-s, c])
}

fn product_probability(rho: &DensityMatrix, a: [f64; 2], b: [f64; 2]) -> f64 {
    let v = Vector4::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]);
    let m = rho.elements();
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            acc += v[i] * v[j] * m[(i, j)].re;
        }
    }
    acc.clamp(0.0, 1.0)
}

pub fn joint_probs(rho: &DensityMatrix, setting: MeasurementSetting) -> JointProbabilities {
    let (a_plus, a_minus) = analyzer(setting.theta_a());
    let (b_plus, b_minus) = analyzer(setting.theta_b());
    JointProbabilities {
        p_pp: product_probability(rho, a_plus, b_plus),
        p_pm: product_probability(rho, a_plus, b_minus),
        p_mp: product_probability(rho, a_minus, b_plus),
        p_mm: product_probability(rho, a_minus, b_minus),
    }
}

/// Polarization correlation `E = p++ + p-- - p+- - p-+`.
pub fn correlation(rho: &DensityMatrix, setting: MeasurementSetting) -> f64 {
    joint_probs(rho, setting).correlation().clamp(-1.0, 1.0)
}
