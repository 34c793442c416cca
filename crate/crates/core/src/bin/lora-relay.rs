use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lora_relay::experiment::{
    cmd_allocate, cmd_analyze, cmd_simulate, cmd_validate, ExperimentSpec, Table, ValidateOptions,
};
use lora_relay::monte_carlo::Check;
use lora_relay::Error;

/// Relay-assisted LoRa sensor network: analysis, simulation and redundancy allocation.
#[derive(Debug, Parser)]
#[command(name = "lora-relay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the analytic loss model for every sweep point.
    Analyze(Common),
    /// Simulate every sweep point, adding seeds until enough losses are seen.
    Simulate(Common),
    /// Choose the redundancy for each loss target on the redundancy axis.
    Allocate {
        #[command(flatten)]
        common: Common,
        /// Also simulate the allocated redundancy.
        #[arg(long)]
        simulate: bool,
    },
    /// Compare the analytic components with sampling oracles.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Check to run (repeatable): interference, fading, receive_window, drop.
        #[arg(long = "check")]
        checks: Vec<Check>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Largest acceptable |z|.
        #[arg(long, default_value_t = 3.0)]
        sigmas: f64,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment file (JSON). Defaults to the built-in `paper_setup` profile.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sweep axis override, e.g. `n=20,40,60`, `relays=0..8`, `r=0,3,max`, `pt=0.01`.
    #[arg(long = "sweep")]
    sweeps: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<u32>,
    #[arg(long)]
    max_runs: Option<u32>,
    #[arg(long)]
    min_losses: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn spec(&self) -> Result<ExperimentSpec, Error> {
        let mut spec = match &self.config {
            Some(path) => ExperimentSpec::load(path)?,
            None => ExperimentSpec::paper_setup(),
        };
        for arg in &self.sweeps {
            spec.apply_sweep_arg(arg)?;
        }
        if let Some(seed) = self.seed {
            spec.seeds.base = Some(seed);
        }
        if let Some(runs) = self.runs {
            spec.seeds.runs = runs;
        }
        if let Some(max_runs) = self.max_runs {
            spec.seeds.max_runs = max_runs;
        }
        if let Some(min_losses) = self.min_losses {
            spec.seeds.min_losses = min_losses;
        }
        if let Some(out) = &self.out {
            spec.output = Some(out.clone());
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn save(table: &Table, spec: &ExperimentSpec, default: &str) -> Result<PathBuf, Error> {
    let path = spec.output.clone().unwrap_or_else(|| PathBuf::from(default));
    table.save(&path)?;
    Ok(path)
}

fn execute(command: Command) -> Result<ExitCode, Error> {
    let (table, spec, default, passed) = match command {
        Command::Analyze(common) => {
            let spec = common.spec()?;
            (cmd_analyze(&spec)?, spec, "analyze.csv", true)
        }
        Command::Simulate(common) => {
            let spec = common.spec()?;
            (cmd_simulate(&spec)?, spec, "simulate.csv", true)
        }
        Command::Allocate { common, simulate } => {
            let spec = common.spec()?;
            (cmd_allocate(&spec, simulate)?, spec, "allocate.csv", true)
        }
        Command::Validate {
            common,
            checks,
            samples,
            sigmas,
        } => {
            let spec = common.spec()?;
            let options = ValidateOptions {
                checks: if checks.is_empty() { Check::ALL.to_vec() } else { checks },
                samples,
                seed: common.seed,
                sigmas,
            };
            let outcome = cmd_validate(&spec, &options)?;
            for r in &outcome.results {
                eprintln!(
                    "{:<15} analytic {:.6e}  sampled {:.6e}  z {:+.2}  {}",
                    r.check.name(),
                    r.analytic,
                    r.monte_carlo,
                    r.z,
                    if r.passed(sigmas) { "pass" } else { "FAIL" }
                );
            }
            (outcome.table, spec, "validate.csv", outcome.passed)
        }
    };
    let path = save(&table, &spec, default)?;
    eprintln!("wrote {} rows to {}", table.rows.len(), path.display());
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
