//! Command-line front end for the spikearm library: runs experiment
//! configs, solves torque calibrations, and recomputes metric summaries
//! from recorded traces.
//!
//! Exit codes: 0 success, 2 config problems (parse errors carry the TOML
//! line and column), 1 everything else.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use spikearm::experiment::io::{read_trace_csv, summary_row_line, SUMMARY_HEADER};
use spikearm::experiment::{
    resolve, run_experiment, summarize_trial, ConfigError, ConfigFile, ResolvedPlant, RunError,
};

/// Output-directory override, consulted when `--out-dir` is absent. The
/// only environment variable this binary reads.
const OUT_DIR_ENV: &str = "SPIKEARM_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "spikearm",
    version,
    about = "Deterministic spiking-controller arm experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment config; write one trace CSV per trial plus a
    /// summary CSV, and echo the summary to stdout.
    Run {
        /// TOML experiment config.
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Execute a parameter sweep (the config must carry a [sweep] table).
    Sweep {
        /// TOML experiment config with a [sweep] table.
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Solve the torque calibration for a config's plant and print the
    /// per-joint nominal torques.
    Calibrate {
        /// TOML experiment config with a two_link_torque plant.
        config: PathBuf,
    },
    /// Recompute the metrics summary from a previously written trace CSV.
    Metrics {
        /// Trace CSV produced by `run` or `sweep`.
        trace: PathBuf,
        /// Moving-average window (samples) applied to speed and jerk.
        #[arg(long, default_value_t = 0)]
        smoothing_window: usize,
    },
}

#[derive(Args)]
struct Overrides {
    /// Override the goal-schedule seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write outputs here instead of the config's out_dir.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Disable plasticity mechanisms in the spiking controller.
    #[arg(long, value_enum)]
    ablate: Option<Ablate>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Ablate {
    Facilitation,
    Psi,
    Both,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_config_problem(&err) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn is_config_problem(err: &anyhow::Error) -> bool {
    err.chain().any(|cause| {
        cause.is::<ConfigError>()
            || matches!(cause.downcast_ref::<RunError>(), Some(RunError::Config(_)))
    })
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Run { config, overrides } => execute(&load(&config, &overrides)?),
        Command::Sweep { config, overrides } => {
            let cfg = load(&config, &overrides)?;
            if cfg.sweep.is_none() {
                bail!(ConfigError::Invalid(format!(
                    "{}: no [sweep] table; use `run` for single experiments",
                    config.display()
                )));
            }
            execute(&cfg)
        }
        Command::Calibrate { config } => calibrate(&config),
        Command::Metrics {
            trace,
            smoothing_window,
        } => metrics(&trace, smoothing_window),
    }
}

fn load(config: &Path, overrides: &Overrides) -> anyhow::Result<ConfigFile> {
    let mut cfg = ConfigFile::load(config)?;
    if let Some(seed) = overrides.seed {
        cfg.experiment.seed = seed;
    }
    if let Some(dir) = &overrides.out_dir {
        cfg.output.out_dir = dir.clone();
    } else if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()) {
        cfg.output.out_dir = PathBuf::from(dir);
    }
    if let Some(ablate) = overrides.ablate {
        let snn = &mut cfg.controller.snn;
        snn.disable_facilitation |= matches!(ablate, Ablate::Facilitation | Ablate::Both);
        snn.disable_psi |= matches!(ablate, Ablate::Psi | Ablate::Both);
    }
    Ok(cfg)
}

fn execute(cfg: &ConfigFile) -> anyhow::Result<()> {
    let out = run_experiment(cfg)?;
    println!("{SUMMARY_HEADER}");
    for row in &out.summary {
        println!("{}", summary_row_line(row));
    }
    for path in out.trace_paths.iter().chain([&out.summary_path]) {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn calibrate(config: &Path) -> anyhow::Result<()> {
    let cfg = ConfigFile::load(config)?;
    let resolved = resolve(&cfg)?;
    match resolved.plant {
        ResolvedPlant::TwoLinkTorque { calibration, .. } => {
            println!("joint,nominal_torque,delta_theta,period_steps");
            for (j, torque) in calibration.nominal_torques.iter().enumerate() {
                println!(
                    "{j},{torque},{},{}",
                    calibration.delta_theta, calibration.period_steps
                );
            }
            Ok(())
        }
        ResolvedPlant::Kinematic { .. } => bail!(ConfigError::Invalid(format!(
            "{}: kinematic plants take no torque calibration",
            config.display()
        ))),
    }
}

fn metrics(trace: &Path, smoothing_window: usize) -> anyhow::Result<()> {
    let label = trace
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trace".to_string());
    let data =
        read_trace_csv(trace).with_context(|| format!("cannot read {}", trace.display()))?;
    // Link lengths are not recorded in traces, so the end-effector row
    // reports kinematics only (no final positional error).
    let rows = summarize_trial(&label, &data, smoothing_window, None);
    println!("{SUMMARY_HEADER}");
    for row in &rows {
        println!("{}", summary_row_line(row));
    }
    Ok(())
}
