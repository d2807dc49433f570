//! Closed-form average beam gains against a Monte-Carlo estimate.
//!
//! Run: cargo run --release --example gain_matrix

use coordbeam::seed::rng_from;
use coordbeam::{angles_from_positions, gain_matrix_analytic, gain_matrix_empirical, sample_scenario, Codebooks, ScenarioConfig};

fn main() -> coordbeam::Result<()> {
    let cfg = ScenarioConfig::desk();
    let cbs = Codebooks::for_scenario(&cfg);
    let mut rng = rng_from(5);
    let ue = &sample_scenario(&cfg, &mut rng)[0];
    let angles = angles_from_positions(ue)?;
    for l in 0..angles.len() {
        println!(
            "path {l}: power {:.2}, AoA {:7.2} deg, AoD {:7.2} deg",
            cfg.path_power_profile[l],
            angles.aoas[l].to_degrees(),
            angles.aods[l].to_degrees()
        );
    }

    let g = gain_matrix_analytic(ue, &cfg.path_power_profile, &cbs.ue, &cbs.bs)?;
    let e = gain_matrix_empirical(ue, &cfg.path_power_profile, &cbs.ue, &cbs.bs, 20_000, &mut rng)?;
    let (q, p) = g.argmax();
    println!("best pair (q={q}, p={p}): analytic {:.3}, empirical {:.3}", g.get(q, p), e.get(q, p));

    let floor = 0.01 * g.max();
    let worst = g
        .values()
        .iter()
        .zip(e.values())
        .filter(|(a, _)| **a > floor)
        .map(|(a, b)| (a - b).abs() / a)
        .fold(0.0, f64::max);
    println!("max relative deviation over significant entries: {worst:.4}");

    println!("analytic gains (rows: BS beam, cols: UE beam), x = above 10% of max");
    for q in 0..g.m_bs() {
        let row: String = g.row(q).iter().map(|&v| if v > 0.1 * g.max() { 'x' } else { '.' }).collect();
        println!("  {q:2} {row}");
    }
    Ok(())
}
