//! Mean rate per UE against the less informed UE's position error, all four
//! strategies, written to CSV.
//!
//! Run: cargo run --release --example error_radius_sweep [blockage] [out.csv]

use std::path::PathBuf;

use coordbeam::scenario::{BLOCKAGE_PROFILE, STRONG_LOS_PROFILE};
use coordbeam::sim::{run_experiment, ExperimentConfig, SweepVariable};

fn main() -> coordbeam::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let blockage = args.iter().any(|a| a == "blockage");
    let out = args.iter().find(|a| a.ends_with(".csv")).map(PathBuf::from);

    let mut cfg = ExperimentConfig::desk();
    cfg.scenario.path_power_profile = if blockage { BLOCKAGE_PROFILE } else { STRONG_LOS_PROFILE }.to_vec();
    cfg.sweep = SweepVariable::ErrorRadiusLessInformed;
    cfg.values = vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0];
    cfg.error_radii = vec![0.0, 0.0];
    for r in run_experiment(&cfg, out.as_deref())? {
        println!("{:>13}  error {:>2} m  {:.3} ± {:.3}", r.strategy, r.sweep_value, r.mean_rate_per_ue, r.std_err);
    }
    Ok(())
}
