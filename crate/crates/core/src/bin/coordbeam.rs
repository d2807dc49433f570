use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use coordbeam::sim::{run_experiment, ExperimentConfig, Preset, SweepVariable, CSV_HEADER};
use coordbeam::StrategyKind;

/// Run a beam-selection sweep and write mean rate per UE as CSV.
///
/// Settings are layered: preset, then the config file, then flags.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    /// key = value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// cluster_radius | error_radius_less_informed | error_radius_all
    #[arg(long)]
    sweep: Option<SweepVariable>,
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    /// uncoordinated, naive, statistical, robust
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<StrategyKind>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "desk")]
    preset: Preset,
    /// CSV path; rows go to stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

fn run(cli: Cli) -> coordbeam::Result<()> {
    let mut cfg = ExperimentConfig::preset(cli.preset);
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    if let Some(v) = cli.sweep {
        cfg.sweep = v;
    }
    if let Some(v) = cli.values {
        cfg.values = v;
    }
    if let Some(v) = cli.strategies {
        cfg.strategies = v;
    }
    if let Some(v) = cli.trials {
        cfg.trials = v;
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| coordbeam::Error::InvalidConfig(e.to_string()))?;
    let records = pool.install(|| run_experiment(&cfg, cli.out.as_deref()))?;
    if cli.out.is_none() {
        println!("{CSV_HEADER}");
    }
    for r in &records {
        if cli.out.is_none() {
            println!("{}", r.csv_row());
        }
        eprintln!("{:>13} {:>8} {:.4} ± {:.4}  ({:.1?})", r.strategy, r.sweep_value, r.mean_rate_per_ue, r.std_err, r.wall_time);
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
