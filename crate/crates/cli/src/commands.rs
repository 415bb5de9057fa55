//! Subcommand implementations. Each returns `Ok(pass)`; errors map to the
//! usage-error exit code.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use qrng_core::bits::format::{read_bits, write_bits, BitFormat};
use qrng_core::bits::{build_x1, build_x2, throughput};
use qrng_core::photon::io::{meta_path, read_counts_csv, read_meta_json, write_counts_csv, write_meta_json};
use qrng_core::photon::run_chsh_acquisition;
use qrng_core::quantum::{
    chsh_from_counts, fidelity, min_entropy_chsh, min_entropy_tomography, subspace_restrict, tomo_reconstruct,
    ChshEntropy, ChshResult, MinEntropyBound, PauliExpectations,
};
use qrng_core::{AcquisitionRecord, ChshSettings, DensityMatrix, SamplingMode, SourceConfig};
use qrng_randtests::{SuiteConfig, TestId, TestParams};
use serde::Serialize;

use crate::manifest::{FileDigest, RunManifest};
use crate::pipeline::{reproduce, ReproduceConfig};
use crate::report::{evaluate, render, Suites};
use crate::state_spec::StateSpec;
use crate::{
    BitsMode, CertifyArgs, Cli, Command, FormatArg, GenbitsArgs, ModeArg, ReplayArgs, ReproduceArgs, SimulateArgs,
    SourceArgs, SuiteArg, TestArgs, SEED_ENV,
};

pub fn dispatch(command: Command, args: &[String]) -> Result<bool> {
    let rec = Recorder { start: Instant::now(), args: args.to_vec() };
    match command {
        Command::Simulate(a) => simulate(&a, &rec),
        Command::Genbits(a) => genbits(&a, &rec),
        Command::Certify(a) => certify(&a, &rec),
        Command::Test(a) => test(&a, &rec),
        Command::ReproducePaper(a) => reproduce_paper(&a, &rec),
        Command::Replay(a) => replay(&a),
    }
}

struct Recorder {
    start: Instant,
    args: Vec<String>,
}

impl Recorder {
    fn write(
        &self,
        command: &str,
        config: impl Serialize,
        seed: Option<u64>,
        inputs: &[&Path],
        outputs: &[&Path],
        manifest_path: &Path,
    ) -> Result<()> {
        let digests = |paths: &[&Path]| paths.iter().map(|p| FileDigest::of(p)).collect::<Result<Vec<_>>>();
        let manifest = RunManifest {
            args: self.args.clone(),
            command: command.into(),
            config: serde_json::to_value(config)?,
            seed,
            inputs: digests(inputs)?,
            outputs: digests(outputs)?,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            working_dir: std::env::current_dir()?,
            wall_clock_seconds: self.start.elapsed().as_secs_f64(),
        };
        manifest.write(manifest_path)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(file))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn source_config(a: &SourceArgs) -> SourceConfig {
    let base = SourceConfig::default();
    let efficiency = a.eta_a * a.eta_b;
    let pair_rate = a.rate.unwrap_or(if efficiency > 0.0 {
        base.detected_pair_rate() / efficiency
    } else {
        base.pair_rate
    });
    SourceConfig {
        pair_rate,
        eta_a: a.eta_a,
        eta_b: a.eta_b,
        accidental_rate: a.accidental_rate,
        tau: a.tau,
        lag: a.lag,
        seed: a.seed,
        mode: match a.mode {
            ModeArg::Poisson => SamplingMode::Poisson,
            ModeArg::Expected => SamplingMode::Expected,
        },
    }
}

#[derive(Serialize)]
struct SimulateConfig<'a> {
    state: String,
    samples_per_setting: usize,
    source: &'a SourceConfig,
}

fn simulate(a: &SimulateArgs, rec: &Recorder) -> Result<bool> {
    let rho = a.state.build()?;
    let cfg = source_config(&a.source);
    let record = run_chsh_acquisition(&cfg, &rho, &ChshSettings::default(), a.samples_per_setting)?;
    let meta = meta_path(&a.out);
    let mut w = create(&a.out)?;
    write_counts_csv(&record, &mut w)?;
    w.flush()?;
    write_meta_json(&cfg, create(&meta)?)?;

    let inputs: Vec<&Path> = match &a.state {
        StateSpec::File(p) => vec![p.as_path()],
        _ => vec![],
    };
    let config = SimulateConfig { state: a.state.to_string(), samples_per_setting: a.samples_per_setting, source: &cfg };
    rec.write("simulate", config, Some(cfg.seed), &inputs, &[&a.out, &meta], &RunManifest::path_for(&a.out))?;
    println!("wrote {} samples to {}", record.len(), a.out.display());
    Ok(true)
}

/// Counts CSV plus its metadata, if any.
pub fn load_counts(counts: &Path, meta: Option<&Path>) -> Result<(AcquisitionRecord, Option<PathBuf>)> {
    let meta = match meta {
        Some(p) => Some(p.to_path_buf()),
        None => Some(meta_path(counts)).filter(|p| p.exists()),
    };
    let config = match &meta {
        Some(p) => read_meta_json(open(p)?).with_context(|| format!("reading {}", p.display()))?,
        None => SourceConfig::default(),
    };
    let record = read_counts_csv(open(counts)?, config).with_context(|| format!("reading {}", counts.display()))?;
    Ok((record, meta))
}

fn bit_format(f: FormatArg) -> BitFormat {
    match f {
        FormatArg::Ascii => BitFormat::Ascii,
        FormatArg::Packed => BitFormat::Packed,
    }
}

fn genbits(a: &GenbitsArgs, rec: &Recorder) -> Result<bool> {
    let (record, meta) = load_counts(&a.counts, a.meta.as_deref())?;
    let seq = match a.mode {
        BitsMode::X1 => build_x1(&record)?,
        BitsMode::X2 => build_x2(&record)?,
    };
    write_bits(&seq, bit_format(a.format), create(&a.out)?)?;
    let report = throughput(&record, &seq)?;

    let mut inputs = vec![a.counts.as_path()];
    inputs.extend(meta.as_deref());
    let config = serde_json::json!({
        "mode": format!("{:?}", a.mode).to_lowercase(),
        "format": format!("{:?}", a.format).to_lowercase(),
        "source": record.config(),
    });
    rec.write("genbits", config, Some(record.config().seed), &inputs, &[&a.out], &RunManifest::path_for(&a.out))?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshSection {
    #[serde(flatten)]
    pub result: ChshResult,
    pub bound: ChshEntropy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSection {
    pub source: String,
    pub coherence: f64,
    pub bound: MinEntropyBound,
    pub fidelity_phi_plus: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clipped_weight: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chsh: Option<ChshSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSection>,
}

pub fn certify_record(record: &AcquisitionRecord) -> Result<ChshSection> {
    let result = chsh_from_counts(record)?;
    let bound = min_entropy_chsh(result.s_value, result.n_events)?;
    Ok(ChshSection { result, bound })
}

pub fn certify_state(rho: &DensityMatrix, source: String, clipped_weight: Option<f64>) -> Result<StateSection> {
    let coherence = subspace_restrict(rho)?.c;
    Ok(StateSection {
        source,
        coherence,
        bound: min_entropy_tomography(coherence)?,
        fidelity_phi_plus: fidelity(rho, &DensityMatrix::phi_plus()),
        clipped_weight,
    })
}

fn parse_pauli(text: &str) -> Result<PauliExpectations> {
    let values = text
        .split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("`{v}` is not a number")))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != 16 {
        bail!("--pauli needs 16 comma-separated values, got {}", values.len());
    }
    PauliExpectations::from_flat(&values).context("invalid Pauli expectations")
}

fn certify(a: &CertifyArgs, rec: &Recorder) -> Result<bool> {
    if a.counts.is_none() && a.state.is_none() && a.pauli.is_none() {
        bail!("certify needs --counts, --state or --pauli");
    }
    let mut inputs: Vec<PathBuf> = vec![];
    let chsh = match &a.counts {
        Some(path) => {
            let (record, meta) = load_counts(path, None)?;
            inputs.push(path.clone());
            inputs.extend(meta);
            Some(certify_record(&record)?)
        }
        None => None,
    };
    let state = if let Some(text) = &a.state {
        let spec = text.parse::<StateSpec>().unwrap_or_else(|_| StateSpec::File(text.into()));
        if let StateSpec::File(p) = &spec {
            inputs.push(p.clone());
        }
        Some(certify_state(&spec.build()?, spec.to_string(), None)?)
    } else if let Some(text) = &a.pauli {
        let r = tomo_reconstruct(&parse_pauli(text)?)?;
        Some(certify_state(&r.state, "pauli".into(), Some(r.clipped_weight))?)
    } else {
        None
    };
    let report = CertifyReport { chsh, state };
    emit(&report, a.out.as_deref(), || certify_summary(&report))?;
    if let Some(out) = &a.out {
        let inputs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
        let config = serde_json::json!({ "state": a.state, "pauli": a.pauli });
        rec.write("certify", config, None, &inputs, &[out], &RunManifest::path_for(out))?;
    }
    Ok(true)
}

fn certify_summary(r: &CertifyReport) -> String {
    let mut out = String::new();
    if let Some(c) = &r.chsh {
        out += &format!(
            "S = {:.6} +/- {:.6} over {} events; CHSH bound {:.6} bits/event\n",
            c.result.s_value, c.result.std_error, c.result.n_events, c.bound.bound.per_event
        );
    }
    if let Some(s) = &r.state {
        out += &format!(
            "C = {:.6}; coherence bound {:.6} bits/event; fidelity to phi+ {:.6}\n",
            s.coherence, s.bound.per_event, s.fidelity_phi_plus
        );
    }
    out
}

/// Writes `value` as JSON to `out` and prints `summary`, or prints the JSON.
fn emit(value: &impl Serialize, out: Option<&Path>, summary: impl FnOnce() -> String) -> Result<()> {
    match out {
        Some(path) => {
            write_json(path, value)?;
            print!("{}", summary());
        }
        None => println!("{}", serde_json::to_string_pretty(value)?),
    }
    Ok(())
}

pub fn suite_config(a: &TestArgs) -> Result<SuiteConfig> {
    let tests = match &a.tests {
        Some(names) => names
            .iter()
            .map(|n| TestId::parse(n).with_context(|| format!("unknown test `{n}`")))
            .collect::<Result<Vec<_>>>()?,
        None => TestId::ALL.to_vec(),
    };
    Ok(SuiteConfig {
        params: TestParams {
            alpha: a.alpha,
            block_frequency_m: a.block_frequency_m,
            serial_m: a.serial_m,
            apen_m: a.apen_m,
            template: a.template.clone(),
            ..TestParams::default()
        },
        n_subsequences: a.subsequences,
        batch_alpha: a.alpha,
        fallback: a.fallback.0,
        tests,
    })
}

fn suites(s: SuiteArg) -> Suites {
    match s {
        SuiteArg::Borel => Suites { borel: true, nist: false, density: false },
        SuiteArg::Nist => Suites { borel: false, nist: true, density: false },
        SuiteArg::Density => Suites { borel: false, nist: false, density: true },
        SuiteArg::All => Suites::ALL,
    }
}

fn test(a: &TestArgs, rec: &Recorder) -> Result<bool> {
    if !(a.alpha > 0.0 && a.alpha < 0.5) {
        bail!("--alpha must lie in (0, 0.5)");
    }
    let cfg = suite_config(a)?;
    let label = a.bits.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let seq = read_bits(open(&a.bits)?, a.format.map(bit_format), &label)
        .with_context(|| format!("reading {}", a.bits.display()))?;
    let report = evaluate(&seq, suites(a.suite), &cfg, a.min_density)?;
    emit(&report, a.out.as_deref(), || render(&report))?;
    if let Some(out) = &a.out {
        let config = serde_json::json!({
            "suite": format!("{:?}", a.suite).to_lowercase(),
            "min_density": a.min_density,
            "nist": cfg,
        });
        rec.write("test", config, None, &[&a.bits], &[out], &RunManifest::path_for(out))?;
    }
    Ok(report.pass)
}

fn reproduce_paper(a: &ReproduceArgs, rec: &Recorder) -> Result<bool> {
    let cfg = ReproduceConfig {
        source: SourceConfig::default().with_seed(a.seed),
        samples_per_setting: a.samples_per_setting,
        ..ReproduceConfig::default()
    };
    let (run, art) = reproduce(&cfg)?;

    let dir = &a.out_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let counts = dir.join("counts.csv");
    let meta = meta_path(&counts);
    let x1 = dir.join("x1.txt");
    let x2 = dir.join("x2.txt");
    let report = dir.join("report.json");
    let mut w = create(&counts)?;
    write_counts_csv(&art.record, &mut w)?;
    w.flush()?;
    write_meta_json(&cfg.source, create(&meta)?)?;
    write_bits(&art.x1, BitFormat::Ascii, create(&x1)?)?;
    write_bits(&art.x2, BitFormat::Ascii, create(&x2)?)?;
    write_json(&report, &run)?;
    rec.write(
        "reproduce-paper",
        &cfg,
        Some(cfg.source.seed),
        &[],
        &[&counts, &meta, &x1, &x2, &report],
        &dir.join("manifest.json"),
    )?;

    println!("seed {}", cfg.source.seed);
    println!(
        "S = {:.6} +/- {:.6}; CHSH bound {:.6} bits/event ({:.1} bits total)",
        run.chsh.s_value, run.chsh.std_error, run.chsh_bound.bound.per_event, run.chsh_bound.total
    );
    println!(
        "tomography: C = {:.6}, bound {:.6}, fidelity {:.6}; bound at C = {} is {:.6}",
        run.tomography.coherence,
        run.tomography.bound.per_event,
        run.tomography.fidelity_phi_plus,
        crate::pipeline::REFERENCE_COHERENCE,
        run.tomography.reference_bound.per_event
    );
    println!(
        "throughput: x1 {:.4} bits/s, x2 {:.4} bits/s over {:.1} min",
        run.throughput_x1.rate,
        run.throughput_x2.rate,
        run.throughput_x2.elapsed_seconds / 60.0
    );
    print!("{}{}", render(&run.x1), render(&run.x2));
    for c in &run.criteria {
        println!("[{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("outputs in {}", dir.display());
    Ok(run.pass)
}

fn replay(a: &ReplayArgs) -> Result<bool> {
    use clap::Parser;

    let manifest = RunManifest::read(&a.manifest)?;
    // Relative paths and the default seed resolve as in the original run.
    std::env::set_current_dir(&manifest.working_dir)
        .with_context(|| format!("entering {}", manifest.working_dir.display()))?;
    match manifest.seed {
        Some(seed) => std::env::set_var(SEED_ENV, seed.to_string()),
        None => std::env::remove_var(SEED_ENV),
    }
    let argv = std::iter::once("qrng".to_string()).chain(manifest.args.iter().cloned());
    let cli = Cli::try_parse_from(argv).context("manifest arguments no longer parse")?;
    if matches!(cli.command, Command::Replay(_)) {
        bail!("manifest records a replay");
    }
    dispatch(cli.command, &manifest.args)?;
    let changed = manifest.changed_outputs()?;
    for out in &manifest.outputs {
        let status = if changed.contains(&out.path) { "differs" } else { "identical" };
        println!("{status}: {}", out.path.display());
    }
    Ok(changed.is_empty())
}
