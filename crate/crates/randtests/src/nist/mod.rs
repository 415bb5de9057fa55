//! NIST SP 800-22 tests.
//!
//! Every test takes a slice of 0/1 bytes and returns one p-value per
//! reported component (two for Serial and Cumulative Sums, one otherwise).
//! Parameters left unset are derived from the input length so that one
//! rule serves whole sequences and subsequences alike.

mod frequency;
mod maurer;
mod rank;
mod serial;
mod spectral;
mod template;

pub use frequency::{block_frequency, cumulative_sums, frequency, longest_run, runs};
pub use maurer::{maurer, maurer_statistic, maurer_block_length};
pub use rank::{binary_matrix_rank, gf2_rank, rank_probabilities};
pub use serial::{approximate_entropy, serial};
pub use spectral::dft;
pub use template::{aperiodic_templates, non_overlapping_template};

use serde::{Deserialize, Serialize};

use crate::{Result, TestError};
use qrng_core::BitSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestId {
    Frequency,
    BlockFrequency,
    Runs,
    LongestRun,
    CumulativeSums,
    Dft,
    Serial,
    ApproximateEntropy,
    Rank,
    Template,
    Maurer,
}

impl TestId {
    pub const ALL: [TestId; 11] = [
        TestId::Frequency,
        TestId::BlockFrequency,
        TestId::Runs,
        TestId::LongestRun,
        TestId::CumulativeSums,
        TestId::Dft,
        TestId::Serial,
        TestId::ApproximateEntropy,
        TestId::Rank,
        TestId::Template,
        TestId::Maurer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestId::Frequency => "Frequency",
            TestId::BlockFrequency => "Frequency within a Block",
            TestId::Runs => "Runs",
            TestId::LongestRun => "Longest Run within a Block",
            TestId::CumulativeSums => "Cumulative Sums",
            TestId::Dft => "Discrete Fourier Transform",
            TestId::Serial => "Serial",
            TestId::ApproximateEntropy => "Approximate Entropy",
            TestId::Rank => "Binary Matrix Rank",
            TestId::Template => "Template Matching",
            TestId::Maurer => "Maurer",
        }
    }

    /// Labels of the p-value components, in output order.
    pub fn components(self) -> &'static [&'static str] {
        match self {
            TestId::CumulativeSums => &["Cumulative Sums (forward)", "Cumulative Sums (backward)"],
            TestId::Serial => &["Serial-1", "Serial-2"],
            TestId::Frequency => &["Frequency"],
            TestId::BlockFrequency => &["Frequency within a Block"],
            TestId::Runs => &["Runs"],
            TestId::LongestRun => &["Longest Run within a Block"],
            TestId::Dft => &["Discrete Fourier Transform"],
            TestId::ApproximateEntropy => &["Approximate Entropy"],
            TestId::Rank => &["Binary Matrix Rank"],
            TestId::Template => &["Template Matching"],
            TestId::Maurer => &["Maurer"],
        }
    }

    /// Results are reported but known to be unreliable.
    pub fn advisory(self) -> bool {
        self == TestId::Dft
    }

    pub fn parse(s: &str) -> Option<TestId> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Some(match key.as_str() {
            "frequency" | "monobit" => TestId::Frequency,
            "block_frequency" | "blockfrequency" => TestId::BlockFrequency,
            "runs" => TestId::Runs,
            "longest_run" | "longestrun" => TestId::LongestRun,
            "cumulative_sums" | "cusum" => TestId::CumulativeSums,
            "dft" | "fft" => TestId::Dft,
            "serial" => TestId::Serial,
            "approximate_entropy" | "apen" => TestId::ApproximateEntropy,
            "rank" | "binary_matrix_rank" => TestId::Rank,
            "template" | "non_overlapping_template" => TestId::Template,
            "maurer" | "universal" => TestId::Maurer,
            _ => return None,
        })
    }
}

impl std::fmt::Display for TestId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub const DEFAULT_ALPHA: f64 = 0.01;
pub const DEFAULT_TEMPLATE: &str = "000000001";
pub const DEFAULT_TEMPLATE_BLOCKS: usize = 8;
pub const RANK_MIN_BITS: usize = 38 * 1024;
pub const MAURER_MIN_BITS: usize = 387_840;

/// Optional overrides; anything unset is derived from the input length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestParams {
    pub alpha: f64,
    pub block_frequency_m: Option<usize>,
    pub serial_m: Option<usize>,
    pub apen_m: Option<usize>,
    /// Template as a string of '0'/'1'.
    pub template: Option<String>,
    pub template_blocks: Option<usize>,
    /// Explicit `(L, Q)` for Maurer's test.
    pub maurer_lq: Option<(usize, usize)>,
}

impl Default for TestParams {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            block_frequency_m: None,
            serial_m: None,
            apen_m: None,
            template: None,
            template_blocks: None,
            maurer_lq: None,
        }
    }
}

impl TestParams {
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    /// Concrete parameters for a test on `n` bits.
    pub fn resolve(&self, test: TestId, n: usize) -> Result<AppliedParams> {
        let log2n = if n > 0 { n.ilog2() as usize } else { 0 };
        let mut p = AppliedParams::default();
        match test {
            TestId::BlockFrequency => p.m = Some(self.block_frequency_m.unwrap_or((n / 100).max(20))),
            TestId::Serial => p.m = Some(self.serial_m.unwrap_or(log2n.saturating_sub(2).clamp(2, 16))),
            TestId::ApproximateEntropy => p.m = Some(self.apen_m.unwrap_or(log2n.saturating_sub(5).clamp(1, 10))),
            TestId::LongestRun => {
                p.m = Some(match n {
                    _ if n < 6272 => 8,
                    _ if n < 750_000 => 128,
                    _ => 10_000,
                })
            }
            TestId::Rank => {
                p.rows = Some(32);
                p.cols = Some(32);
            }
            TestId::Template => {
                let t = self.template.clone().unwrap_or_else(|| DEFAULT_TEMPLATE.to_string());
                if t.is_empty() || t.len() > 24 || !t.bytes().all(|c| c == b'0' || c == b'1') {
                    return Err(TestError::InvalidParameter(format!("template `{t}`")));
                }
                p.m = Some(t.len());
                p.template = Some(t);
                p.blocks = Some(self.template_blocks.unwrap_or(DEFAULT_TEMPLATE_BLOCKS));
            }
            TestId::Maurer => {
                let (l, q) = match self.maurer_lq {
                    Some(lq) => lq,
                    None => {
                        let l = maurer_block_length(n).unwrap_or(6);
                        (l, 10 << l)
                    }
                };
                p.l = Some(l);
                p.q = Some(q);
            }
            TestId::Frequency | TestId::Runs | TestId::CumulativeSums | TestId::Dft => {}
        }
        p.validate(test)?;
        Ok(p)
    }
}

/// Parameters actually used by a run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppliedParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub template: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(rename = "Q", skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
}

impl AppliedParams {
    fn validate(&self, test: TestId) -> Result<()> {
        let bad = |msg: String| Err(TestError::InvalidParameter(msg));
        match test {
            TestId::BlockFrequency if self.m == Some(0) => bad("block frequency m must be positive".into()),
            TestId::Serial if !matches!(self.m, Some(2..=24)) => bad(format!("serial m {:?} outside 2..=24", self.m)),
            TestId::ApproximateEntropy if !matches!(self.m, Some(1..=23)) => {
                bad(format!("approximate entropy m {:?} outside 1..=23", self.m))
            }
            TestId::Template if self.blocks == Some(0) => bad("template blocks must be positive".into()),
            TestId::Maurer if !matches!(self.l, Some(1..=16)) || self.q == Some(0) => {
                bad(format!("Maurer L = {:?}, Q = {:?}", self.l, self.q))
            }
            _ => Ok(()),
        }
    }

    /// Smallest input length for which the test is defined.
    pub fn min_length(&self, test: TestId) -> usize {
        match test {
            TestId::Frequency | TestId::CumulativeSums => 1,
            TestId::Runs | TestId::Dft => 2,
            TestId::BlockFrequency => self.m.unwrap_or(1),
            TestId::LongestRun => 128,
            TestId::Serial => self.m.unwrap_or(2),
            TestId::ApproximateEntropy => self.m.unwrap_or(1) + 1,
            TestId::Rank => RANK_MIN_BITS,
            TestId::Template => {
                // at least one expected match per block: M - m + 1 >= 2^m
                let m = self.m.unwrap_or(9);
                self.blocks.unwrap_or(DEFAULT_TEMPLATE_BLOCKS) * ((1usize << m) + m - 1)
            }
            TestId::Maurer => match (self.l, self.q) {
                (Some(l), Some(q)) if q == 10 << l => maurer::recommended_min_length(l),
                (Some(l), Some(q)) => l * (q + 1),
                _ => MAURER_MIN_BITS,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test_id: TestId,
    pub params: AppliedParams,
    pub p_values: Vec<f64>,
    pub alpha: f64,
    /// All p-values at least `alpha`.
    pub pass: bool,
}

pub fn run_statistical_test(seq: &BitSequence, test: TestId, params: &TestParams) -> Result<TestResult> {
    run_test_bits(seq.bits(), test, params)
}

/// Runs one test on raw 0/1 bytes.
pub fn run_test_bits(bits: &[u8], test: TestId, params: &TestParams) -> Result<TestResult> {
    let applied = params.resolve(test, bits.len())?;
    let p_values = evaluate(bits, test, &applied)?;
    let pass = p_values.iter().all(|&p| p >= params.alpha);
    Ok(TestResult { test_id: test, params: applied, p_values, alpha: params.alpha, pass })
}

pub(crate) fn evaluate(bits: &[u8], test: TestId, p: &AppliedParams) -> Result<Vec<f64>> {
    let required = p.min_length(test);
    if bits.len() < required {
        return Err(TestError::InsufficientLength { test: test.name(), required, actual: bits.len() });
    }
    let m = || p.m.expect("resolved");
    Ok(match test {
        TestId::Frequency => vec![frequency(bits)],
        TestId::BlockFrequency => vec![block_frequency(bits, m())],
        TestId::Runs => vec![runs(bits)],
        TestId::LongestRun => vec![longest_run(bits)],
        TestId::CumulativeSums => {
            let (f, b) = cumulative_sums(bits);
            vec![f, b]
        }
        TestId::Dft => vec![dft(bits)],
        TestId::Serial => {
            let (p1, p2) = serial(bits, m());
            vec![p1, p2]
        }
        TestId::ApproximateEntropy => vec![approximate_entropy(bits, m())],
        TestId::Rank => vec![binary_matrix_rank(bits)],
        TestId::Template => {
            let t: Vec<u8> = p.template.as_deref().unwrap_or(DEFAULT_TEMPLATE).bytes().map(|c| c - b'0').collect();
            vec![non_overlapping_template(bits, &t, p.blocks.unwrap_or(DEFAULT_TEMPLATE_BLOCKS))]
        }
        TestId::Maurer => vec![maurer(bits, p.l.expect("resolved"), p.q.expect("resolved"))],
    })
}

#[cfg(test)]
pub(crate) fn ascii(s: &str) -> Vec<u8> {
    s.bytes().filter(|c| !c.is_ascii_whitespace()).map(|c| c - b'0').collect()
}
