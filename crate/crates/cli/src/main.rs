//! `qelm-lab`: batch runner for QELM noise, mitigation and UQ experiments.
//!
//! Exit status is 0 on success, 1 for usage or validation errors and 2 when
//! a run fails.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qelm_lab::harness::{MitigatorKind, ScenarioId};

use config::{Overrides, SEED_ENV};

#[derive(Parser)]
#[command(name = "qelm-lab", version, about = "Quantum extreme learning machine experiments under noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outcome distribution of a circuit file, as JSON on stdout.
    Simulate(SimulateArgs),
    /// Train a model with the scenario's training backend and test it with
    /// its test backend; writes model.json and evaluation.json.
    Train(RunArgs),
    /// Run a scenario with its ideal baseline; writes the report files.
    Scenario(RunArgs),
    /// Uncertainty quantification only (scenario backends and ideal).
    Uq(RunArgs),
    /// Pick the best ZNE settings for a profile from a fixed grid.
    CalibrateZne(CalibrateArgs),
    /// Re-emit the report files from a results.json.
    Report(ReportArgs),
}

#[derive(Args, Clone)]
pub struct RunArgs {
    /// JSON run configuration; omitted fields take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: Option<ScenarioId>,
    /// Bundled profile name (device-a, device-b, device-c, zero-noise) or a
    /// profile JSON path.
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long, value_parser = parse_mitigator)]
    pub mitigator: Option<MitigatorKind>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub shots: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Upper bound on concurrent jobs (default: available parallelism).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Print the fully resolved configuration and exit.
    #[arg(long)]
    pub print_config: bool,
    /// Print the circuit of the first training row and exit.
    #[arg(long)]
    pub dump_circuit: bool,
    /// `train` only: use ideal backends for both phases (no profile needed).
    #[arg(long)]
    pub ideal: bool,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            scenario: self.scenario,
            profile: self.profile.clone(),
            mitigator: self.mitigator,
            repeats: self.repeats,
            shots: self.shots,
            out: self.out.clone(),
            seed: self.seed,
            jobs: self.jobs,
        }
    }
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Circuit in the line-oriented text form.
    pub circuit: PathBuf,
    #[arg(long)]
    pub profile: Option<String>,
    /// Sample this many shots and print counts instead of probabilities.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write distribution.json here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the parsed circuit and exit.
    #[arg(long)]
    pub dump_circuit: bool,
}

#[derive(Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Representative circuit; defaults to the first training row's circuit.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
}

#[derive(Args)]
pub struct ReportArgs {
    /// A results.json file or the directory holding it.
    #[arg(long)]
    pub results: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_scenario(s: &str) -> Result<ScenarioId, String> {
    s.parse().map_err(|e: qelm_lab::Error| e.to_string())
}

fn parse_mitigator(s: &str) -> Result<MitigatorKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "zne" => Ok(MitigatorKind::Zne),
        "qlear" | "q-lear" => Ok(MitigatorKind::Qlear),
        _ => Err(format!("unknown mitigator `{s}` (expected zne or qlear)")),
    }
}

pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<config::UsageError> for Failure {
    fn from(e: config::UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    let outcome = match &cli.command {
        Command::Simulate(a) => commands::simulate(a, env_seed.as_deref()),
        Command::Train(a) => commands::train(a, env_seed.as_deref()),
        Command::Scenario(a) => commands::scenario(a, env_seed.as_deref()),
        Command::Uq(a) => commands::uq(a, env_seed.as_deref()),
        Command::CalibrateZne(a) => commands::calibrate_zne(a, env_seed.as_deref()),
        Command::Report(a) => commands::report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("run failed: {msg}");
            ExitCode::from(2)
        }
    }
}
