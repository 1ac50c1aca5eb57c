//! Command-line front end for `cvclone`: noise-figure sweeps, cloning
//! sweeps, homodyne phase scans, crossing searches and Monte-Carlo checks.
//!
//! Exit codes: 0 success, 1 domain error (or failed check), 2 usage error.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "cvclone",
    version,
    about = "Gaussian simulator for quantum-limited amplification and cloning of twin beams"
)]
pub struct Cli {
    /// `key = value` config file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Noise figure versus gain (ideal, detector-rescaled, simulated).
    Nf(NfArgs),
    /// Inseparability and EPR parameters versus gain at unity gain-loss product.
    CloneSweep(CloneSweepArgs),
    /// Joint-quadrature noise as both homodyne phases are scanned.
    PhaseScan(PhaseScanArgs),
    /// Gain at which inseparability or EPR correlations are lost.
    FindCrossing(FindCrossingArgs),
    /// Monte-Carlo homodyne sampling checked against the analytic metrics.
    SampleCheck(SampleCheckArgs),
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub gain_min: Option<f64>,
    #[arg(long)]
    pub gain_max: Option<f64>,
    /// Number of linearly spaced gains, endpoints included.
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct NfArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Detector efficiency.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Output CSV (`-` for stdout).
    #[arg(long)]
    pub out: Option<String>,
}

/// Source and loss budget of the cloning chain.
#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Two-mode noise reduction of the source in dB.
    #[arg(long)]
    pub squeezing_db: Option<f64>,
    /// Antisqueezing in dB; omitted means a pure source.
    #[arg(long)]
    pub antisqueezing_db: Option<f64>,
    /// Detector efficiency.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Transmission of each cell window.
    #[arg(long)]
    pub window_t: Option<f64>,
    /// Windows per beam before the amplifier.
    #[arg(long)]
    pub windows: Option<u32>,
    #[arg(long)]
    pub polarizer_t: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CloneSweepArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct PhaseScanArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Amplifier gain.
    #[arg(long)]
    pub gain: Option<f64>,
    /// Attenuator transmission; defaults to 1/gain.
    #[arg(long)]
    pub transmission: Option<f64>,
    /// Electronic gain on the conjugate homodyne signal.
    #[arg(long)]
    pub g: Option<f64>,
    /// Phase points on [0, 2π).
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricArg {
    Insep,
    Epr12,
}

impl FromStr for MetricArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "insep" | "inseparability" => Ok(MetricArg::Insep),
            "epr12" | "epr" => Ok(MetricArg::Epr12),
            other => Err(format!(
                "unknown metric `{other}` (expected insep or epr12)"
            )),
        }
    }
}

impl std::fmt::Display for MetricArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MetricArg::Insep => "insep",
            MetricArg::Epr12 => "epr12",
        })
    }
}

#[derive(Debug, Args)]
pub struct FindCrossingArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// `insep` (I reaches 2) or `epr12` (E12 reaches 1).
    #[arg(long)]
    pub metric: Option<MetricArg>,
    /// Initial upper end of the gain bracket.
    #[arg(long)]
    pub g_hi: Option<f64>,
    /// Largest gain searched.
    #[arg(long)]
    pub g_limit: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Vacuum,
    Tmsv,
    Chain,
}

impl FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "vacuum" => Ok(Scenario::Vacuum),
            "tmsv" => Ok(Scenario::Tmsv),
            "chain" => Ok(Scenario::Chain),
            other => Err(format!(
                "unknown scenario `{other}` (expected vacuum, tmsv or chain)"
            )),
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scenario::Vacuum => "vacuum",
            Scenario::Tmsv => "tmsv",
            Scenario::Chain => "chain",
        })
    }
}

#[derive(Debug, Args)]
pub struct SampleCheckArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long)]
    pub block_size: Option<usize>,
    /// `vacuum`, `tmsv` or `chain` (pure ideal chain at --gain).
    #[arg(long)]
    pub scenario: Option<Scenario>,
    #[arg(long)]
    pub squeezing_db: Option<f64>,
    #[arg(long)]
    pub gain: Option<f64>,
    /// Optional CSV report (`-` for stdout).
    #[arg(long)]
    pub out: Option<String>,
}

/// Runs a parsed command line. Results go to `stdout`, provenance and
/// diagnostics to `stderr`.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => config::load_config(path)?,
        None => config::ConfigMap::new(),
    };
    match cli.command {
        Command::Nf(args) => commands::nf(&args, &file, stdout, stderr),
        Command::CloneSweep(args) => commands::clone_sweep(&args, &file, stdout, stderr),
        Command::PhaseScan(args) => commands::phase_scan(&args, &file, stdout, stderr),
        Command::FindCrossing(args) => commands::find_crossing(&args, &file, stdout, stderr),
        Command::SampleCheck(args) => commands::sample_check(&args, &file, stdout, stderr),
    }
}

/// Parses `args` (program name first) and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match run(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
