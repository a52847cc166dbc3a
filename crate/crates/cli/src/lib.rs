//! `canonflow` command-line front end.

mod commands;
mod manifest;
mod report;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use canonflow::algebra::{parse_rational, rational_to_f64};
use canonflow::verify::Suite;

pub use manifest::{InputDigest, RunManifest};
pub use report::Report;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_FINAL: f64 = 40.0;
pub const DEFAULT_PATHS: usize = 10_000;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_DEGREE: u32 = 4;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(name = "canonflow", version, about = "Canonical stochastic flows on the phase plane")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run identity, integrator and closed-form verification suites.
    Verify(VerifyArgs),
    /// Simulate an ensemble and write its trajectories as CSV.
    Simulate(SimulateArgs),
    /// Stationary covariance of a linear model.
    Steady(SteadyArgs),
    /// Compare the quantum Langevin coefficients with the classical model.
    CompareQuantum(QuantumArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all", value_parser = parse_suite)]
    pub suite: Suite,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_DEGREE)]
    pub degree: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Treat discrepant closed-form audits as failures.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = DEFAULT_T_FINAL, value_parser = parse_real)]
    pub t_final: f64,
    #[arg(long, default_value_t = DEFAULT_DT, value_parser = parse_real)]
    pub dt: f64,
    #[arg(long, default_value_t = DEFAULT_PATHS)]
    pub paths: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Co-integrate the Jacobian of the flow map.
    #[arg(long)]
    pub jacobian: bool,
    #[arg(long, default_value_t = 1)]
    pub record_stride: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SteadyArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Search for the cross-term coefficient with zero `<qp>`.
    #[arg(long)]
    pub find_z: bool,
    /// Compare with a Monte Carlo ensemble of N paths.
    #[arg(long, value_name = "N")]
    pub mc_check: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QuantumArgs {
    #[arg(long, value_parser = parse_real, allow_negative_numbers = true)]
    pub hbar: f64,
    #[arg(long, value_parser = parse_real, allow_negative_numbers = true)]
    pub m: f64,
    #[arg(long, value_parser = parse_real, allow_negative_numbers = true)]
    pub omega: f64,
    #[arg(long, value_parser = parse_real, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, value_parser = parse_real, allow_negative_numbers = true)]
    pub n: f64,
    #[arg(long, value_parser = parse_real, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

/// Decimal or `a/b` rational.
fn parse_real(s: &str) -> Result<f64, String> {
    parse_rational(s)
        .map(|r| rational_to_f64(&r))
        .map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Input(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code: 0 success, 1 failed check, 2 usage or input error,
/// 3 numeric failure.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Verify(a) => commands::verify(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Steady(a) => commands::steady(&a),
        Command::CompareQuantum(a) => commands::compare_quantum(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
