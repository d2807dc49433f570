//! Experiment configuration, Monte-Carlo trial runner and CSV output.

mod config;
mod runner;

pub use config::{ExperimentConfig, Preset, SweepVariable};
pub use runner::{
    mean_and_std_err, run_experiment, run_trial, run_trial_detailed, ResultRecord, TrialOutcome, CSV_HEADER,
    MAX_SCENARIO_ATTEMPTS,
};
