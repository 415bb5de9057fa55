use serde::{Deserialize, Serialize};

use super::measurement::{correlation, ChshSettings};
use super::state::DensityMatrix;
use super::{QuantumError, Result};
use crate::photon::{AcquisitionRecord, CoincidenceSample};

/// Sign of each correlation in `S = E11 + E12 + E21 - E22`.
pub const CHSH_SIGNS: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

/// Analytic CHSH value of a state at the given settings.
pub fn chsh_s(rho: &DensityMatrix, settings: &ChshSettings) -> f64 {
    settings
        .settings()
        .iter()
        .zip(CHSH_SIGNS)
        .map(|(s, sign)| sign * correlation(rho, *s))
        .sum()
}

/// S estimated from coincidence counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub s_value: f64,
    /// Standard error of S from sample-to-sample count fluctuations.
    pub std_error: f64,
    /// Total coincidences over all settings.
    pub n_events: u64,
    pub per_setting_e: [f64; 4],
}

pub fn chsh_from_counts(record: &AcquisitionRecord) -> Result<ChshResult> {
    chsh_from_samples(record.samples())
}

/// Estimates S from samples tagged with their setting index.
///
/// Per setting, E is the ratio of pooled sums
/// `(N_AB + N_A'B' - N_AB' - N_A'B) / N_total`. The error is the standard
/// error of the mean of per-sample E values, added in quadrature over the
/// four settings. Samples with no coincidences carry no E estimate and are
/// left out of the variance.
pub fn chsh_from_samples(samples: &[CoincidenceSample]) -> Result<ChshResult> {
    #[derive(Default, Clone, Copy)]
    struct Acc {
        count: usize,
        diff: i128,
        total: u128,
        // Welford over per-sample E
        n_e: usize,
        mean: f64,
        m2: f64,
    }

    let mut acc = [Acc::default(); 4];
    for s in samples {
        let a = &mut acc[s.setting_index as usize];
        a.count += 1;
        let [ab, apb, abp, apbp] = s.counts();
        let diff = ab as i128 + apbp as i128 - abp as i128 - apb as i128;
        let total = s.total();
        a.diff += diff;
        a.total += total as u128;
        if total > 0 {
            let e = diff as f64 / total as f64;
            a.n_e += 1;
            let delta = e - a.mean;
            a.mean += delta / a.n_e as f64;
            a.m2 += delta * (e - a.mean);
        }
    }

    let mut per_setting_e = [0.0; 4];
    let mut variance = 0.0;
    let mut n_events: u64 = 0;
    for (k, a) in acc.iter().enumerate() {
        if a.count == 0 {
            return Err(QuantumError::MissingSetting(k));
        }
        if a.count < 2 {
            return Err(QuantumError::TooFewSamples { setting: k, count: a.count });
        }
        if a.total == 0 {
            return Err(QuantumError::ZeroCounts(k));
        }
        per_setting_e[k] = a.diff as f64 / a.total as f64;
        if a.n_e >= 2 {
            let sample_var = a.m2 / (a.n_e - 1) as f64;
            variance += sample_var / a.n_e as f64;
        }
        n_events += a.total as u64;
    }

    let s_value = per_setting_e.iter().zip(CHSH_SIGNS).map(|(e, sign)| sign * e).sum();
    Ok(ChshResult {
        s_value,
        std_error: variance.sqrt(),
        n_events,
        per_setting_e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::state::werner;

    fn sample(setting_index: u8, c: [u64; 4]) -> CoincidenceSample {
        CoincidenceSample::new(setting_index, c[0], c[1], c[2], c[3])
    }

    #[test]
    fn tsirelson_for_phi_plus() {
        let s = chsh_s(&DensityMatrix::phi_plus(), &ChshSettings::default());
        assert!((s - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn mixed_state_gives_zero() {
        let rho = DensityMatrix::maximally_mixed();
        let settings = ChshSettings::from_angles(3.0, 50.0, 11.0, 130.0).unwrap();
        assert!(chsh_s(&rho, &settings).abs() < 1e-15);
    }

    #[test]
    fn werner_scales_linearly() {
        let v = 2.4618 / (2.0 * std::f64::consts::SQRT_2);
        let s = chsh_s(&werner(v).unwrap(), &ChshSettings::default());
        assert!((s - 2.4618).abs() < 1e-4);
    }

    #[test]
    fn perfect_correlation_counts() {
        // (k, 0, 0, k) everywhere: every E = 1, S = 1 + 1 + 1 - 1.
        let samples: Vec<_> = (0..4u8)
            .flat_map(|k| (0..5).map(move |_| sample(k, [7, 0, 0, 7])))
            .collect();
        let r = chsh_from_samples(&samples).unwrap();
        assert_eq!(r.s_value, 2.0);
        assert_eq!(r.std_error, 0.0);
        assert_eq!(r.n_events, 4 * 5 * 14);
        assert_eq!(r.per_setting_e, [1.0; 4]);
    }

    #[test]
    fn flat_counts_give_zero() {
        let samples: Vec<_> = (0..4u8)
            .flat_map(|k| (1..4).map(move |j| sample(k, [j; 4])))
            .collect();
        let r = chsh_from_samples(&samples).unwrap();
        assert_eq!(r.s_value, 0.0);
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn std_error_matches_hand_computation() {
        // Setting 0: E values 1 and 0 -> var 0.5, sem^2 = 0.25. Others constant.
        let mut samples = vec![sample(0, [2, 0, 0, 0]), sample(0, [1, 1, 0, 0])];
        for k in 1..4u8 {
            samples.push(sample(k, [1, 0, 0, 1]));
            samples.push(sample(k, [1, 0, 0, 1]));
        }
        let r = chsh_from_samples(&samples).unwrap();
        assert!((r.std_error - 0.5).abs() < 1e-15);
        // pooled E for setting 0: (3 - 1)/4
        assert!((r.per_setting_e[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn error_paths() {
        let three: Vec<_> = (0..3u8).flat_map(|k| [sample(k, [1; 4]), sample(k, [1; 4])]).collect();
        assert_eq!(chsh_from_samples(&three), Err(QuantumError::MissingSetting(3)));

        let mut single = three.clone();
        single.push(sample(3, [1; 4]));
        assert_eq!(
            chsh_from_samples(&single),
            Err(QuantumError::TooFewSamples { setting: 3, count: 1 })
        );

        let mut empty = three;
        empty.push(sample(3, [0; 4]));
        empty.push(sample(3, [0; 4]));
        assert_eq!(chsh_from_samples(&empty), Err(QuantumError::ZeroCounts(3)));
    }
}
