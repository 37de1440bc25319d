//! Command-line front end: train the scheduler, compare policies, sweep
//! scenario knobs, and sample topologies. Exit codes: 0 on success, 1 on
//! configuration problems, 2 on runtime failures.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use syncsched_core::harness::{
    cmd_compare, cmd_gen_topology, cmd_online_train, cmd_scenario_sweep, cmd_train, Overrides,
    SweepAxis,
};
use syncsched_core::{parse_config, ConfigError, Error, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "syncsched",
    about = "Simulate distributed SDN controller synchronization and schedule broadcasts",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario config file (TOML); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override the training seed / comparison seed list.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory for CSVs and checkpoints.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Checkpoint file (written by `train`, read by `compare`/`sweep`).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum AxisArg {
    /// Standard deviation of Gaussian BIS values.
    BisStd,
    /// Mean of the Poisson budget distribution.
    BudgetLambda,
}

impl From<AxisArg> for SweepAxis {
    fn from(axis: AxisArg) -> Self {
        match axis {
            AxisArg::BisStd => SweepAxis::BisStd,
            AxisArg::BudgetLambda => SweepAxis::BudgetLambda,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Pretrain on generated history, then train the scheduler.
    Train(CommonArgs),
    /// Train fully online, without pretraining.
    OnlineTrain(CommonArgs),
    /// Run all configured policies under identical randomness per seed.
    Compare(CommonArgs),
    /// Repeat the comparison across values of one scenario knob.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// Axis values; the axis default is used when omitted.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Sample the configured topology and print it as a config snippet.
    GenTopology(CommonArgs),
}

fn load_config(path: &Option<PathBuf>) -> Result<ScenarioConfig, ConfigError> {
    match path {
        Some(path) => parse_config(path),
        None => Ok(ScenarioConfig::default()),
    }
}

fn overrides(args: &CommonArgs) -> Overrides {
    Overrides {
        seed: args.seed,
        out_dir: args.out.clone(),
        checkpoint: args.checkpoint.clone(),
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Train(args) => {
            let config = load_config(&args.config)?;
            let artifacts = cmd_train(&config, &overrides(&args))?;
            println!("checkpoint: {}", artifacts.checkpoint.display());
            println!("metrics: {}", artifacts.metrics.display());
        }
        Command::OnlineTrain(args) => {
            let config = load_config(&args.config)?;
            let artifacts = cmd_online_train(&config, &overrides(&args))?;
            println!("checkpoint: {}", artifacts.checkpoint.display());
            println!("metrics: {}", artifacts.metrics.display());
        }
        Command::Compare(args) => {
            let config = load_config(&args.config)?;
            let path = cmd_compare(&config, &overrides(&args))?;
            println!("comparison: {}", path.display());
        }
        Command::Sweep { common, axis, values } => {
            let config = load_config(&common.config)?;
            let axis = SweepAxis::from(axis);
            let values = if values.is_empty() { axis.default_values() } else { values };
            let path = cmd_scenario_sweep(&config, &overrides(&common), axis, &values)?;
            println!("sweep: {}", path.display());
        }
        Command::GenTopology(args) => {
            let config = load_config(&args.config)?;
            let snippet = cmd_gen_topology(&config, &overrides(&args))?;
            match &args.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(Error::from)?;
                    let path = dir.join("topology.toml");
                    std::fs::write(&path, &snippet).map_err(Error::from)?;
                    println!("topology: {}", path.display());
                }
                None => print!("{snippet}"),
            }
        }
    }
    Ok(())
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        // A missing checkpoint is a configuration problem, not a crash.
        match e {
            Error::MissingCheckpoint(_) => CliError::Config(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(message)) => {
            eprintln!("config error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
