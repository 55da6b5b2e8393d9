//! Command-line front end for the pipeline.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use super::{run, PipelineConfig, PipelineError, Stage, StageStatus};

#[derive(Debug, Parser)]
#[command(name = "gridrisk", version, about = "Climate outage risk and joint-network cascade pipeline")]
pub struct Cli {
    /// Pipeline config (TOML).
    #[arg(long, global = true, default_value = "gridrisk.toml")]
    pub config: PathBuf,
    /// Override the output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override the seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Stages for `run`: `all` or a comma-separated list.
    #[arg(long, global = true)]
    pub stages: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Parse and clean the outage CSV.
    Ingest,
    /// Descriptive statistics of cleaned records.
    Characterize,
    /// Trend and two-sample hypothesis tests.
    Hypotheses,
    /// Severity labeling and logistic model.
    Severity,
    /// Build the joint power-communication network.
    Network,
    /// Initial failure sets for each scenario.
    Scenarios,
    /// Cascade simulation.
    Simulate,
    /// Tables, CSV series and charts.
    Report,
    /// Several stages in order (`--stages`, default: the config's toggles).
    Run,
}

impl Command {
    fn stage(self) -> Option<Stage> {
        Some(match self {
            Command::Ingest => Stage::Ingest,
            Command::Characterize => Stage::Characterize,
            Command::Hypotheses => Stage::Hypotheses,
            Command::Severity => Stage::Severity,
            Command::Network => Stage::Network,
            Command::Scenarios => Stage::Scenarios,
            Command::Simulate => Stage::Simulate,
            Command::Report => Stage::Report,
            Command::Run => return None,
        })
    }
}

fn execute(cli: &Cli) -> Result<(), PipelineError> {
    let mut cfg = PipelineConfig::load(&cli.config)?;
    if let Some(out) = &cli.out {
        cfg.out_dir = std::env::current_dir().map(|d| d.join(out)).unwrap_or_else(|_| out.clone());
    }
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    let stages = match (cli.command.stage(), &cli.stages) {
        (Some(_), Some(_)) => {
            return Err(PipelineError::Config { key: "--stages".into(), msg: "only valid with `run`".into() })
        }
        (Some(stage), None) => vec![stage],
        (None, Some(list)) => Stage::parse_list(list)?,
        (None, None) => cfg.stages.selected(),
    };
    for r in run(&cfg, &stages)? {
        match r.status {
            StageStatus::UpToDate => println!("{}: up to date", r.stage),
            StageStatus::Ran => println!("{}: wrote {} artifacts", r.stage, r.outputs.len()),
        }
    }
    Ok(())
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
