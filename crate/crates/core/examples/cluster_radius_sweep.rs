//! Mean rate per UE against the cluster radius, uncoordinated selection with
//! perfect position information.
//!
//! Run: cargo run --release --example cluster_radius_sweep [trials]

use coordbeam::sim::{run_experiment, ExperimentConfig, SweepVariable};
use coordbeam::StrategyKind;

fn main() -> coordbeam::Result<()> {
    let mut cfg = ExperimentConfig::desk();
    cfg.trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(500);
    cfg.strategies = vec![StrategyKind::Uncoordinated, StrategyKind::Naive];
    cfg.sweep = SweepVariable::ClusterRadius;
    cfg.values = vec![1.0, 3.0, 7.0, 15.0, 30.0];
    for r in run_experiment(&cfg, None)? {
        println!("{:>13}  r_cl = {:>4} m  {:.3} ± {:.3}", r.strategy, r.sweep_value, r.mean_rate_per_ue, r.std_err);
    }
    Ok(())
}
