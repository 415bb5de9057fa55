//! Subsequence batteries: split a sequence into N non-overlapping pieces,
//! test each, and judge the pass proportion and the uniformity of p-values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::nist::{evaluate, AppliedParams, TestId, TestParams};
use crate::special::{clamp_p, igamc};
use crate::{Result, TestError};
use qrng_core::BitSequence;

pub const UNIFORMITY_THRESHOLD: f64 = 1e-4;
const BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchVerdict {
    pub test_id: TestId,
    pub component: String,
    pub params: AppliedParams,
    #[serde(rename = "N")]
    pub n_subsequences: usize,
    pub subsequence_length: usize,
    pub alpha: f64,
    pub passed: usize,
    pub proportion: f64,
    pub n_min: f64,
    #[serde(rename = "uniformity_P")]
    pub uniformity_p: f64,
    pub pass: bool,
    pub advisory: bool,
}

/// `1 - alpha - 3 sqrt(alpha (1 - alpha) / N)`.
pub fn proportion_threshold(alpha: f64, n: usize) -> f64 {
    1.0 - alpha - 3.0 * (alpha * (1.0 - alpha) / n as f64).sqrt()
}

/// Smallest passing count: `floor(N * threshold)`, so 96 of 100 at
/// alpha = 0.01 and 16 of 20 at alpha = 0.05.
pub fn min_passing(alpha: f64, n: usize) -> usize {
    (n as f64 * proportion_threshold(alpha, n) + 1e-9).floor().max(0.0) as usize
}

/// Chi-square uniformity of p-values over ten equal bins, 9 degrees of freedom.
pub fn uniformity_p(p_values: &[f64]) -> f64 {
    let mut bins = [0u64; BINS];
    for &p in p_values {
        bins[((p * BINS as f64) as usize).min(BINS - 1)] += 1;
    }
    let expected = p_values.len() as f64 / BINS as f64;
    let chi2: f64 = bins.iter().map(|&f| (f as f64 - expected).powi(2) / expected).sum();
    clamp_p(igamc((BINS - 1) as f64 / 2.0, chi2 / 2.0))
}

/// One verdict per p-value component of `test`.
pub fn batch_test(
    seq: &BitSequence,
    test: TestId,
    params: &TestParams,
    n_subsequences: usize,
    alpha: f64,
) -> Result<Vec<BatchVerdict>> {
    batch_test_bits(seq.bits(), test, params, n_subsequences, alpha)
}

pub(crate) fn batch_test_bits(
    bits: &[u8],
    test: TestId,
    params: &TestParams,
    n_subsequences: usize,
    alpha: f64,
) -> Result<Vec<BatchVerdict>> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(TestError::InvalidAlpha(alpha));
    }
    if n_subsequences == 0 {
        return Err(TestError::InvalidParameter("need at least one subsequence".into()));
    }
    let sub_len = bits.len() / n_subsequences;
    let applied = params.resolve(test, sub_len)?;
    let required = applied.min_length(test);
    if sub_len < required {
        return Err(TestError::InsufficientLength {
            test: test.name(),
            required: required * n_subsequences,
            actual: bits.len(),
        });
    }
    let per_sub: Vec<Vec<f64>> = bits[..sub_len * n_subsequences]
        .par_chunks_exact(sub_len)
        .map(|sub| evaluate(sub, test, &applied))
        .collect::<Result<_>>()?;

    let need = min_passing(alpha, n_subsequences);
    Ok(test
        .components()
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let ps: Vec<f64> = per_sub.iter().map(|v| v[i]).collect();
            let passed = ps.iter().filter(|&&p| p >= alpha).count();
            let uniformity_p = uniformity_p(&ps);
            BatchVerdict {
                test_id: test,
                component: (*label).to_string(),
                params: applied.clone(),
                n_subsequences,
                subsequence_length: sub_len,
                alpha,
                passed,
                proportion: passed as f64 / n_subsequences as f64,
                n_min: need as f64 / n_subsequences as f64,
                uniformity_p,
                pass: passed >= need && uniformity_p >= UNIFORMITY_THRESHOLD,
                advisory: test.advisory(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert_eq!(min_passing(0.01, 100), 96);
        assert_eq!(min_passing(0.05, 20), 16);
        assert!((proportion_threshold(0.01, 100) - 0.960_150_7).abs() < 1e-6);
    }

    #[test]
    fn uniformity_extremes() {
        let flat: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((uniformity_p(&flat) - 1.0).abs() < 1e-12);
        // all mass in the top bin: chi2 = 900
        let top = vec![1.0; 100];
        let expected = igamc(4.5, 450.0);
        assert_eq!(uniformity_p(&top), expected);
        assert!(expected < 1e-180);
    }

    #[test]
    fn alternating_passes_proportion_but_not_uniformity() {
        let bits: Vec<u8> = (0..100 * 200).map(|i| (i % 2) as u8).collect();
        let seq = BitSequence::new(bits, "alt").unwrap();
        let v = batch_test(&seq, TestId::Frequency, &TestParams::default(), 100, 0.01).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].passed, 100);
        assert!((v[0].n_min - 0.96).abs() < 1e-12);
        assert!(v[0].uniformity_p < UNIFORMITY_THRESHOLD);
        assert!(!v[0].pass);
    }

    #[test]
    fn errors() {
        let seq = BitSequence::new([0, 1].repeat(500), "s").unwrap();
        let p = TestParams::default();
        assert!(matches!(batch_test(&seq, TestId::Frequency, &p, 10, 0.5), Err(TestError::InvalidAlpha(_))));
        assert!(matches!(batch_test(&seq, TestId::Frequency, &p, 0, 0.01), Err(TestError::InvalidParameter(_))));
        assert!(matches!(
            batch_test(&seq, TestId::Rank, &p, 10, 0.01),
            Err(TestError::InsufficientLength { .. })
        ));
        let serial = batch_test(&seq, TestId::Serial, &p, 10, 0.01).unwrap();
        assert_eq!(serial.len(), 2);
        assert_eq!(serial[1].component, "Serial-2");
    }
}
