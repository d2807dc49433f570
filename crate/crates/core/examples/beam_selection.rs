//! The four selection strategies on one two-UE scenario.
//!
//! Run: cargo run --release --example beam_selection

use coordbeam::selection::select_all;
use coordbeam::seed::rng_from;
use coordbeam::{
    build_beliefs, draw_channel, evaluate_sinr, sample_scenario, Codebooks, ErrorModel, ScenarioConfig, SelectionSetup,
    StrategyKind,
};

fn main() -> coordbeam::Result<()> {
    let cfg = ScenarioConfig { cluster_radius: 3.0, ..ScenarioConfig::desk() };
    let cbs = Codebooks::for_scenario(&cfg);
    let mut rng = rng_from(3);
    let truth = sample_scenario(&cfg, &mut rng);
    let em = ErrorModel::per_observer(cfg.num_paths, &[0.0, 6.0], 0.0);
    let beliefs = build_beliefs(&truth, &em, &mut rng);
    let channels = truth
        .iter()
        .map(|p| draw_channel(p, &cfg.path_power_profile, cfg.n_bs, cfg.n_ue, &mut rng))
        .collect::<coordbeam::Result<Vec<_>>>()?;

    let setup = SelectionSetup { config: &cfg, codebooks: &cbs, mc_iterations: 32, seed: 99 };
    for s in StrategyKind::ALL {
        let asg = select_all(&beliefs, setup, s)?;
        let r = evaluate_sinr(&channels, &asg, &cbs, cfg.noise_power);
        let pairs: Vec<String> = asg.pairs().iter().map(|bp| format!("(q={}, p={})", bp.bs, bp.ue)).collect();
        println!("{s:>13}: {}  rates {:.2} / {:.2} bits/s/Hz", pairs.join(" "), r.rates[0], r.rates[1]);
    }
    Ok(())
}
