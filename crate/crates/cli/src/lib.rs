//! Batch verification campaigns over the `qcr-core` library.
//!
//! A campaign is a [`CampaignConfig`]; [`run`] executes the selected suites,
//! writes the report and returns the process exit code.

pub mod config;
pub mod report;
pub mod suites;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{CampaignConfig, Format, Overrides};
pub use report::{Report, ReportRow};
pub use suites::Suite;

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "QCR_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("computation error: {0}")]
    Compute(#[from] qcr_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        2
    }
}

#[derive(Debug, Parser)]
#[command(name = "qcr", version, about = "Verification campaigns for quantization and reduction on SU(n)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduced norms of characters against their closed forms.
    Isometry(RunArgs),
    /// Weyl integration formula checks.
    WeylIntegral(RunArgs),
    /// Orthogonality of Weyl numerators in the heat measure.
    Orthogonality(RunArgs),
    /// Regularity classifiers, contraction determinant and orientation signs.
    Reduction(RunArgs),
    /// The contraction-determinant identity.
    DetIdentity(RunArgs),
    /// Round trips through the reduction map and its unitarity.
    QcrRoundtrip(RunArgs),
    /// Every suite.
    All(RunArgs),
}

impl Command {
    fn split(&self) -> (Option<Suite>, &RunArgs) {
        match self {
            Command::Isometry(a) => (Some(Suite::Isometry), a),
            Command::WeylIntegral(a) => (Some(Suite::WeylIntegral), a),
            Command::Orthogonality(a) => (Some(Suite::Orthogonality), a),
            Command::Reduction(a) => (Some(Suite::Reduction), a),
            Command::DetIdentity(a) => (Some(Suite::DetIdentity), a),
            Command::QcrRoundtrip(a) => (Some(Suite::QcrRoundtrip), a),
            Command::All(a) => (None, a),
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// TOML campaign file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    pub rank: Option<usize>,
    /// Comma-separated list of ħ values.
    #[arg(long, value_name = "LIST")]
    pub hbar: Option<String>,
    #[arg(long, value_name = "N")]
    pub max_level: Option<i64>,
    #[arg(long, value_name = "N")]
    pub mc_samples: Option<usize>,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Report path; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Replace every suite tolerance.
    #[arg(long, value_name = "X")]
    pub tolerance: Option<f64>,
}

impl RunArgs {
    fn overrides(&self) -> Result<Overrides, CliError> {
        let hbar = match &self.hbar {
            Some(s) => Some(config::parse_hbar_list(s).map_err(|e| CliError::Config(format!("--hbar {e}")))?),
            None => None,
        };
        Ok(Overrides {
            rank: self.rank,
            hbar,
            max_level: self.max_level,
            mc_samples: self.mc_samples,
            seed: self.seed,
            format: self.format,
            out: self.out.clone(),
            tolerance: self.tolerance,
        })
    }
}

fn worker_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got `{v}`")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Io(e.to_string()))
}

/// Builds the effective configuration of a command.
pub fn resolve_config(args: &RunArgs) -> Result<CampaignConfig, CliError> {
    let mut cfg = match &args.config {
        Some(p) => CampaignConfig::load(p)?,
        None => CampaignConfig::default(),
    };
    cfg.apply(&args.overrides()?);
    cfg.validate()?;
    Ok(cfg)
}

/// Runs the selected suites (all when `None`) inside the configured pool.
pub fn execute(cfg: &CampaignConfig, suite: Option<Suite>) -> Result<Report, CliError> {
    let pool = worker_pool()?;
    let selected: Vec<Suite> = match suite {
        Some(s) => vec![s],
        None => Suite::ALL.to_vec(),
    };
    pool.install(|| suites::run_suites(cfg, &selected))
}

fn write_report(cfg: &CampaignConfig, report: &Report) -> Result<(), CliError> {
    let text = report.render(cfg.format);
    match &cfg.output {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Parses, runs and reports; the return value is the exit code.
pub fn run(cli: Cli) -> u8 {
    let (suite, args) = cli.command.split();
    let result = resolve_config(args).and_then(|cfg| {
        let report = execute(&cfg, suite)?;
        write_report(&cfg, &report)?;
        Ok(report)
    });
    match result {
        Ok(report) => {
            if report.all_pass() {
                0
            } else {
                eprintln!(
                    "qcr: {} of {} rows failed",
                    report.metadata.failed, report.metadata.rows
                );
                1
            }
        }
        Err(e) => {
            eprintln!("qcr: {e}");
            e.exit_code()
        }
    }
}
