//! Sequence reports shared by `test` and `reproduce-paper`.

use std::fmt::Write as _;

use anyhow::Result;
use qrng_core::bits::{bias, information_density};
use qrng_core::BitSequence;
use qrng_randtests::{borel_bound, borel_normality, run_suite, BorelReport, NistReport, SuiteConfig};
use serde::{Deserialize, Serialize};

pub const DEFAULT_MIN_DENSITY: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Suites {
    pub borel: bool,
    pub nist: bool,
    pub density: bool,
}

impl Suites {
    pub const ALL: Suites = Suites { borel: true, nist: true, density: true };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub information_density: f64,
    pub min_density: f64,
    pub bias: f64,
    /// Borel bound at the sequence length, used as the bias ceiling.
    pub bias_bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub label: String,
    pub length: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub borel: Option<BorelReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nist: Option<NistReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityReport>,
    /// Requested suites that could not run on a sequence this short.
    pub not_applicable: Vec<String>,
    pub pass: bool,
}

pub fn evaluate(seq: &BitSequence, suites: Suites, nist: &SuiteConfig, min_density: f64) -> Result<SequenceReport> {
    let mut report = SequenceReport {
        label: seq.label().to_string(),
        length: seq.len(),
        borel: None,
        nist: None,
        density: None,
        not_applicable: vec![],
        pass: true,
    };
    if suites.borel {
        match borel_normality(seq) {
            Ok(b) => report.borel = Some(b),
            Err(e) => report.not_applicable.push(format!("borel: {e}")),
        }
    }
    if suites.density {
        match information_density(seq) {
            Ok(d) => {
                let b = bias(seq);
                let bound = borel_bound(seq.len());
                report.density = Some(DensityReport {
                    information_density: d,
                    min_density,
                    bias: b,
                    bias_bound: bound,
                    pass: d >= min_density && b < bound,
                });
            }
            Err(e) => report.not_applicable.push(format!("density: {e}")),
        }
    }
    if suites.nist {
        report.nist = Some(run_suite(seq, nist)?);
    }
    report.pass = report.borel.as_ref().is_none_or(|b| b.pass)
        && report.density.as_ref().is_none_or(|d| d.pass)
        && report.nist.as_ref().is_none_or(|n| n.pass);
    Ok(report)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

/// Plain-text table; p-values shown to 6 decimals.
pub fn render(report: &SequenceReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "sequence {} ({} bits): {}", report.label, report.length, verdict(report.pass));
    if let Some(b) = &report.borel {
        let _ = writeln!(out, "  Borel normality  bound {:.6}  m_max {}  {}", b.bound, b.m_max, verdict(b.pass));
        for (m, d) in &b.per_m {
            let _ = writeln!(out, "    m = {m:<2} max deviation {d:.6}");
        }
    }
    if let Some(d) = &report.density {
        let _ = writeln!(
            out,
            "  density {:.6} (min {})  bias {:.6} (bound {:.6})  {}",
            d.information_density,
            d.min_density,
            d.bias,
            d.bias_bound,
            verdict(d.pass)
        );
    }
    if let Some(n) = &report.nist {
        let _ = writeln!(out, "  whole sequence");
        for r in &n.single {
            for (label, p) in r.test_id.components().iter().zip(&r.p_values) {
                let _ = writeln!(out, "    {label:<28} {p:.6}  {}", verdict(*p >= r.alpha));
            }
        }
        let _ = writeln!(out, "  subsequences");
        for v in &n.batch {
            let _ = writeln!(
                out,
                "    {:<28} {:.6}  {:>3}/{:<3} (min {:.2})  {}{}",
                v.component,
                v.uniformity_p,
                v.passed,
                v.n_subsequences,
                v.n_min,
                verdict(v.pass),
                if v.advisory { "  advisory" } else { "" }
            );
        }
        for na in &n.not_applicable {
            let _ = writeln!(out, "    {:<28} n/a ({:?}): {}", na.test_id.name(), na.scope, na.reason);
        }
    }
    for na in &report.not_applicable {
        let _ = writeln!(out, "  n/a {na}");
    }
    out
}
