//! `qrng`: simulate coincidence counts, extract parity bits, certify
//! min-entropy and run randomness tests, with a manifest beside every
//! output.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qrng_core::photon::DEFAULT_SEED;

pub mod commands;
pub mod manifest;
pub mod pipeline;
pub mod report;
pub mod state_spec;

use state_spec::StateSpec;

pub const SEED_ENV: &str = "QRNG_SEED";

#[derive(Debug, Parser)]
#[command(name = "qrng", version, about = "Parity-based QRNG simulation and certification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a block-sequential CHSH acquisition and write a counts CSV.
    Simulate(SimulateArgs),
    /// Extract a parity bit sequence from a counts CSV.
    Genbits(GenbitsArgs),
    /// Compute S and min-entropy bounds from counts and/or state data.
    Certify(CertifyArgs),
    /// Run randomness tests on a bit file.
    Test(TestArgs),
    /// Run the full-scale pipeline end to end and check every criterion.
    ReproducePaper(ReproduceArgs),
    /// Re-run the command recorded in a manifest and compare outputs.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Poisson,
    Expected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BitsMode {
    X1,
    X2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Ascii,
    Packed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Borel,
    Nist,
    Density,
    All,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Counting interval in seconds.
    #[arg(long, default_value_t = 0.2)]
    pub tau: f64,
    /// Dead time between intervals in seconds.
    #[arg(long, default_value_t = 0.1)]
    pub lag: f64,
    /// Generated pairs per second [default: 7500 detected pairs/s at the given efficiencies].
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long, default_value_t = 0.3)]
    pub eta_a: f64,
    #[arg(long, default_value_t = 0.3)]
    pub eta_b: f64,
    /// Accidental coincidences per second per channel.
    #[arg(long, default_value_t = 0.0)]
    pub accidental_rate: f64,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Poisson)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// phi-plus[:phase_deg], werner:V or file:<path>.
    #[arg(long, default_value = "werner:0.8704")]
    pub state: StateSpec,
    #[arg(long, default_value_t = 50_000)]
    pub samples_per_setting: usize,
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value = "counts.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenbitsArgs {
    #[arg(long)]
    pub counts: PathBuf,
    /// Source metadata [default: <counts stem>.meta.json when present].
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BitsMode::X2)]
    pub mode: BitsMode,
    #[arg(long, value_enum, default_value_t = FormatArg::Ascii)]
    pub format: FormatArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// Reconstructed or model state: phi-plus[:phase], werner:V, file:<path> or a JSON path.
    #[arg(long, conflicts_with = "pauli")]
    pub state: Option<String>,
    /// Sixteen Pauli expectations <s_i s_j>, i, j over I, X, Y, Z, row-major.
    #[arg(long, allow_hyphen_values = true)]
    pub pauli: Option<String>,
    /// Report path [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub bits: PathBuf,
    /// Input format [default: detected].
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    /// Significance level for whole-sequence and subsequence runs.
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, default_value_t = 100)]
    pub subsequences: usize,
    /// `N,alpha` used when a test cannot run on the primary subsequences.
    #[arg(long, default_value = "20,0.05", value_parser = parse_fallback)]
    pub fallback: Fallback,
    /// Comma-separated subset of NIST tests.
    #[arg(long, value_delimiter = ',')]
    pub tests: Option<Vec<String>>,
    #[arg(long)]
    pub block_frequency_m: Option<usize>,
    #[arg(long)]
    pub serial_m: Option<usize>,
    #[arg(long)]
    pub apen_m: Option<usize>,
    /// Template for Template Matching, as 0/1 characters.
    #[arg(long)]
    pub template: Option<String>,
    #[arg(long, default_value_t = report::DEFAULT_MIN_DENSITY)]
    pub min_density: f64,
    /// Report path [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fallback(pub Option<(usize, f64)>);

fn parse_fallback(s: &str) -> Result<Fallback, String> {
    if s == "none" {
        return Ok(Fallback(None));
    }
    let (n, a) = s.split_once(',').ok_or("expected `N,alpha` or `none`")?;
    let n = n.trim().parse().map_err(|e| format!("N: {e}"))?;
    let a = a.trim().parse().map_err(|e| format!("alpha: {e}"))?;
    Ok(Fallback(Some((n, a))))
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = pipeline::SAMPLES_PER_SETTING)]
    pub samples_per_setting: usize,
    /// Directory for counts, bit files and the report.
    #[arg(long, default_value = "reproduction")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

/// Exit codes.
pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS });
        }
    };
    let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match commands::dispatch(cli.command, &args) {
        Ok(true) => ExitCode::from(EXIT_PASS),
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
