//! Full-scale chain: simulate, certify, extract, test.

use anyhow::Result;
use qrng_core::bits::{build_x1, build_x2, throughput, ThroughputReport};
use qrng_core::photon::{run_chsh_acquisition, run_tomography_acquisition};
use qrng_core::quantum::{
    chsh_from_counts, fidelity, min_entropy_chsh, min_entropy_tomography, subspace_restrict, tomo_reconstruct, werner,
    ChshEntropy, ChshResult, MinEntropyBound,
};
use qrng_core::{AcquisitionRecord, BitSequence, ChshSettings, DensityMatrix, SourceConfig};
use qrng_randtests::SuiteConfig;
use serde::{Deserialize, Serialize};

use crate::report::{evaluate, SequenceReport, Suites, DEFAULT_MIN_DENSITY};

pub const VISIBILITY: f64 = 0.8704;
pub const SAMPLES_PER_SETTING: usize = 50_000;
/// Reference S and the coherence of the reference tomography.
pub const REFERENCE_S: f64 = 2.4618;
pub const REFERENCE_COHERENCE: f64 = 0.44;
pub const TOMOGRAPHY_EVENTS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproduceConfig {
    pub source: SourceConfig,
    pub visibility: f64,
    pub samples_per_setting: usize,
    pub tomography_events: u64,
    pub nist: SuiteConfig,
    pub min_density: f64,
}

impl Default for ReproduceConfig {
    fn default() -> Self {
        Self {
            source: SourceConfig::default(),
            visibility: VISIBILITY,
            samples_per_setting: SAMPLES_PER_SETTING,
            tomography_events: TOMOGRAPHY_EVENTS,
            nist: SuiteConfig::default(),
            min_density: DEFAULT_MIN_DENSITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographySummary {
    pub events: u64,
    pub coherence: f64,
    pub bound: MinEntropyBound,
    pub fidelity_phi_plus: f64,
    pub clipped_weight: f64,
    /// Bound at the reference coherence.
    pub reference_bound: MinEntropyBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub detail: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRun {
    pub config: ReproduceConfig,
    pub chsh: ChshResult,
    pub chsh_bound: ChshEntropy,
    pub tomography: TomographySummary,
    pub throughput_x1: ThroughputReport,
    pub throughput_x2: ThroughputReport,
    pub x1: SequenceReport,
    pub x2: SequenceReport,
    pub criteria: Vec<Criterion>,
    pub pass: bool,
}

pub struct Artifacts {
    pub rho: DensityMatrix,
    pub record: AcquisitionRecord,
    pub x1: BitSequence,
    pub x2: BitSequence,
}

fn criterion(name: &str, pass: bool, detail: String) -> Criterion {
    Criterion { name: name.into(), detail, pass }
}

fn tomography(cfg: &ReproduceConfig, rho: &DensityMatrix) -> Result<TomographySummary> {
    let run = run_tomography_acquisition(&cfg.source, rho, cfg.tomography_events)?;
    let rec = tomo_reconstruct(&run.expectations)?;
    let coherence = subspace_restrict(&rec.state)?.c;
    Ok(TomographySummary {
        events: run.basis_events.iter().sum(),
        coherence,
        bound: min_entropy_tomography(coherence)?,
        fidelity_phi_plus: fidelity(&rec.state, &DensityMatrix::phi_plus()),
        clipped_weight: rec.clipped_weight,
        reference_bound: min_entropy_tomography(REFERENCE_COHERENCE)?,
    })
}

fn judge(run: &ReferenceRun) -> Vec<Criterion> {
    let c = &run.chsh;
    let sigmas = (c.s_value - REFERENCE_S).abs() / c.std_error;
    let mut out = vec![criterion(
        "chsh",
        sigmas <= 3.0 && c.std_error < 1e-3,
        format!("S = {:.6} +/- {:.6}, {sigmas:.2} sigma from {REFERENCE_S}", c.s_value, c.std_error),
    )];
    for seq in [&run.x1, &run.x2] {
        if let Some(b) = &seq.borel {
            let worst = b.per_m.iter().map(|&(_, d)| d).fold(0.0, f64::max);
            out.push(criterion(
                &format!("borel_{}", seq.label),
                b.pass,
                format!("max deviation {worst:.6} vs bound {:.6}", b.bound),
            ));
        }
    }
    if let Some(d) = &run.x2.density {
        out.push(criterion(
            "bias_x2",
            d.bias < d.bias_bound,
            format!("bias {:.6} vs {:.6}", d.bias, d.bias_bound),
        ));
        out.push(criterion(
            "density_x2",
            d.information_density >= d.min_density,
            format!("{:.6} vs {}", d.information_density, d.min_density),
        ));
    }
    for seq in [&run.x1, &run.x2] {
        if let Some(n) = &seq.nist {
            let failed: Vec<_> = n.batch.iter().filter(|v| !v.pass).map(|v| v.component.clone()).collect();
            out.push(criterion(
                &format!("batch_{}", seq.label),
                failed.is_empty(),
                format!("{} rows, failed: {failed:?}", n.batch.len()),
            ));
            let failed: Vec<_> = n.single.iter().filter(|r| !r.pass).map(|r| r.test_id.name()).collect();
            out.push(criterion(
                &format!("single_{}", seq.label),
                failed.is_empty(),
                format!("{} tests, failed: {failed:?}", n.single.len()),
            ));
        }
    }
    out
}

pub fn reproduce(cfg: &ReproduceConfig) -> Result<(ReferenceRun, Artifacts)> {
    let rho = werner(cfg.visibility)?;
    let record = run_chsh_acquisition(&cfg.source, &rho, &ChshSettings::default(), cfg.samples_per_setting)?;
    let chsh = chsh_from_counts(&record)?;
    let chsh_bound = min_entropy_chsh(chsh.s_value, chsh.n_events)?;
    let tomography = tomography(cfg, &rho)?;

    let x1 = build_x1(&record)?;
    let x2 = build_x2(&record)?;
    let throughput_x1 = throughput(&record, &x1)?;
    let throughput_x2 = throughput(&record, &x2)?;
    let x1_report = evaluate(&x1, Suites::ALL, &cfg.nist, cfg.min_density)?;
    let x2_report = evaluate(&x2, Suites::ALL, &cfg.nist, cfg.min_density)?;

    let mut run = ReferenceRun {
        config: cfg.clone(),
        chsh,
        chsh_bound,
        tomography,
        throughput_x1,
        throughput_x2,
        x1: x1_report,
        x2: x2_report,
        criteria: vec![],
        pass: false,
    };
    run.criteria = judge(&run);
    run.pass = run.criteria.iter().all(|c| c.pass);
    Ok((run, Artifacts { rho, record, x1, x2 }))
}
