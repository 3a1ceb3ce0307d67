//! Experiment layer: TOML configs, schedules, trial execution, CSV output.

pub mod config;
pub mod io;
pub mod runner;
pub mod schedule;

pub use config::{ConfigError, ConfigFile, ControllerKind, ExperimentKind, PlantKind, ScheduleKind};
pub use runner::{
    build_trials, resolve, run_experiment, run_trial, run_trials, run_trials_sequential,
    summarize_trial, ResolvedExperiment, ResolvedPlant, RunError, RunOutput, SummaryRow,
    TrialController, TrialSpec,
};
pub use schedule::{random_goal_schedule, ScheduledTarget};

#[cfg(feature = "parallel")]
pub use runner::run_trials_parallel;
