//! Whole-sequence runs plus subsequence batteries for a set of tests.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::batch::{batch_test_bits, BatchVerdict};
use crate::nist::{run_test_bits, TestId, TestParams, TestResult};
use crate::{Result, TestError};
use qrng_core::BitSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Per-test overrides; `params.alpha` is the whole-sequence threshold.
    pub params: TestParams,
    pub n_subsequences: usize,
    pub batch_alpha: f64,
    /// `(N, alpha)` tried when a test's minimum length rules out the
    /// primary subsequence count.
    pub fallback: Option<(usize, f64)>,
    pub tests: Vec<TestId>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            params: TestParams::default(),
            n_subsequences: 100,
            batch_alpha: 0.01,
            fallback: Some((20, 0.05)),
            tests: TestId::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Single,
    Batch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NotApplicable {
    pub test_id: TestId,
    pub scope: Scope,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NistReport {
    pub length: usize,
    pub single: Vec<TestResult>,
    pub batch: Vec<BatchVerdict>,
    pub not_applicable: Vec<NotApplicable>,
    /// Every applicable single result and batch verdict passed.
    pub pass: bool,
}

fn not_applicable(test_id: TestId, scope: Scope, err: &TestError) -> NotApplicable {
    NotApplicable { test_id, scope, reason: err.to_string() }
}

fn run_batch(bits: &[u8], test: TestId, cfg: &SuiteConfig) -> Result<std::result::Result<Vec<BatchVerdict>, TestError>> {
    let mut attempts = vec![(cfg.n_subsequences, cfg.batch_alpha)];
    if let Some((n, a)) = cfg.fallback.filter(|&(n, _)| n < cfg.n_subsequences) {
        attempts.push((n, a));
    }
    let mut last = None;
    for (n, alpha) in attempts {
        match batch_test_bits(bits, test, &cfg.params, n, alpha) {
            Ok(v) => return Ok(Ok(v)),
            Err(e @ TestError::InsufficientLength { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Ok(Err(last.expect("at least one attempt")))
}

pub fn run_suite(seq: &BitSequence, cfg: &SuiteConfig) -> Result<NistReport> {
    let bits = seq.bits();
    let outcomes = cfg
        .tests
        .par_iter()
        .map(|&test| {
            let single = match run_test_bits(bits, test, &cfg.params) {
                Ok(r) => Ok(r),
                Err(e @ TestError::InsufficientLength { .. }) => Err(e),
                Err(e) => return Err(e),
            };
            Ok((test, single, run_batch(bits, test, cfg)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = NistReport { length: bits.len(), single: vec![], batch: vec![], not_applicable: vec![], pass: true };
    for (test, single, batch) in outcomes {
        match single {
            Ok(r) => report.single.push(r),
            Err(e) => report.not_applicable.push(not_applicable(test, Scope::Single, &e)),
        }
        match batch {
            Ok(v) => report.batch.extend(v),
            Err(e) => report.not_applicable.push(not_applicable(test, Scope::Batch, &e)),
        }
    }
    report.pass = report.single.iter().all(|r| r.pass) && report.batch.iter().all(|v| v.pass);
    Ok(report)
}
