//! Borel normality: every m-bit block, m = 1..=floor(log2 log2 |x|), must
//! occur with frequency within sqrt(log2 |x| / |x|) of 2^-m.

use serde::{Deserialize, Serialize};

use crate::{Result, TestError};
use qrng_core::BitSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorelReport {
    pub length: usize,
    pub bound: f64,
    pub m_max: usize,
    /// `(m, max deviation)` for m = 1..=m_max.
    pub per_m: Vec<(usize, f64)>,
    pub pass: bool,
}

/// `floor(log2 log2 n)`; zero below 4 bits.
pub fn m_max(n: usize) -> usize {
    if n < 4 {
        return 0;
    }
    // largest m with 2^(2^m) <= n, in integer arithmetic
    let mut m = 1;
    while (1u32 << (m + 1)) < usize::BITS && (1usize << (1usize << (m + 1))) <= n {
        m += 1;
    }
    m
}

const MAX_BLOCK: usize = 24;

pub fn borel_bound(n: usize) -> f64 {
    let n = n as f64;
    (n.log2() / n).sqrt()
}

/// Maximum deviation of non-overlapping m-block frequencies from 2^-m.
/// Blocks are counted over `floor(n/m)` blocks; the remainder is dropped.
///
/// Any `1 <= m <= min(n, 24)` is accepted; [`borel_normality`] only uses
/// `m <= m_max(n)`.
pub fn borel_statistic(seq: &BitSequence, m: usize) -> Result<f64> {
    block_deviation(seq.bits(), m)
}

pub(crate) fn block_deviation(bits: &[u8], m: usize) -> Result<f64> {
    let m_max = bits.len().min(MAX_BLOCK);
    if m == 0 || m > m_max {
        return Err(TestError::BlockLengthOutOfRange { m, m_max });
    }
    let mut counts = vec![0u64; 1 << m];
    for block in bits.chunks_exact(m) {
        let j = block.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        counts[j] += 1;
    }
    let blocks = (bits.len() / m) as f64;
    let expected = 1.0 / (1u64 << m) as f64;
    Ok(counts
        .iter()
        .map(|&c| (c as f64 / blocks - expected).abs())
        .fold(0.0, f64::max))
}

pub fn borel_normality(seq: &BitSequence) -> Result<BorelReport> {
    let n = seq.len();
    if n < 4 {
        return Err(TestError::InsufficientLength { test: "Borel normality", required: 4, actual: n });
    }
    let bound = borel_bound(n);
    let m_max = m_max(n);
    let per_m = (1..=m_max)
        .map(|m| block_deviation(seq.bits(), m).map(|d| (m, d)))
        .collect::<Result<Vec<_>>>()?;
    let pass = per_m.iter().all(|&(_, d)| d <= bound);
    Ok(BorelReport { length: n, bound, m_max, per_m, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> BitSequence {
        BitSequence::from_ascii(s, "t").unwrap()
    }

    #[test]
    fn m_max_values() {
        assert_eq!(m_max(3), 0);
        assert_eq!(m_max(4), 1);
        assert_eq!(m_max(15), 1);
        assert_eq!(m_max(16), 2);
        assert_eq!(m_max(255), 2);
        assert_eq!(m_max(256), 3);
        assert_eq!(m_max(65_535), 3);
        assert_eq!(m_max(65_536), 4);
        assert_eq!(m_max(200_000), 4);
        assert_eq!(m_max(800_000), 4);
    }

    #[test]
    fn statistic_examples() {
        assert_eq!(borel_statistic(&seq("0101"), 1).unwrap(), 0.0);
        // blocks "01","01": |2/2 - 1/4|
        assert_eq!(borel_statistic(&seq("0101"), 2).unwrap(), 0.75);
        assert_eq!(borel_statistic(&seq(&"0".repeat(64)), 1).unwrap(), 0.5);
        // remainder dropped: "011" with m = 2 is the single block "01"
        assert_eq!(borel_statistic(&seq("011"), 2).unwrap(), 0.75);
        assert!(matches!(
            borel_statistic(&seq("0101"), 5),
            Err(TestError::BlockLengthOutOfRange { m: 5, m_max: 4 })
        ));
        assert!(borel_statistic(&seq("0101"), 0).is_err());
    }

    #[test]
    fn bounds_at_reference_lengths() {
        let x1 = borel_bound(200_000);
        let x2 = borel_bound(800_000);
        assert!((x1 - 0.0094).abs() < 1e-4, "{x1}");
        assert!((x2 - 0.00495).abs() < 5e-5, "{x2}");
    }

    #[test]
    fn short_sequence_rejected() {
        assert!(borel_normality(&seq("010")).is_err());
        let r = borel_normality(&seq("0110")).unwrap();
        assert_eq!(r.m_max, 1);
        assert!(r.pass);
    }
}
