//! Ground-truth geometry, noisy hierarchical beliefs and the prior/posterior samplers.
//!
//! Run: cargo run --release --example scenario_beliefs

use coordbeam::seed::rng_from;
use coordbeam::{build_beliefs, sample_posterior, sample_prior, sample_scenario, ErrorModel, ScenarioConfig};

fn main() {
    let cfg = ScenarioConfig::desk();
    let mut rng = rng_from(11);
    let truth = sample_scenario(&cfg, &mut rng);
    println!("reflectors (shared): {:?}", truth[0].reflectors);
    for (w, p) in truth.iter().enumerate() {
        println!("UE {w} at ({:.2}, {:.2})", p.ue.x, p.ue.y);
    }

    // UE 0 knows everything exactly, UE 1 has 5 m errors on every node but the BS
    let em = ErrorModel::per_observer(cfg.num_paths, &[0.0, 5.0], 0.0);
    let beliefs = build_beliefs(&truth, &em, &mut rng);
    for b in &beliefs {
        let e = &b.estimates[b.observer];
        println!(
            "observer {} puts itself at ({:.2}, {:.2}), error {:.2} m",
            b.observer,
            e.ue.x,
            e.ue.y,
            e.ue.distance(truth[b.observer].ue)
        );
    }

    let n = 2000;
    let spread = |draws: &[coordbeam::Point2]| {
        let cx = draws.iter().map(|p| p.x).sum::<f64>() / n as f64;
        let cy = draws.iter().map(|p| p.y).sum::<f64>() / n as f64;
        let c = coordbeam::Point2::new(cx, cy);
        (c, draws.iter().map(|p| p.distance(c)).sum::<f64>() / n as f64)
    };
    let prior: Vec<_> = (0..n).map(|_| sample_prior(&cfg, &mut rng)[1].ue).collect();
    let post: Vec<_> = (0..n).map(|_| sample_posterior(&beliefs[1], &cfg, &mut rng)[1].ue).collect();
    let (pc, ps) = spread(&prior);
    let (qc, qs) = spread(&post);
    println!("prior of UE 1:           center ({:.2}, {:.2}), mean spread {ps:.2} m", pc.x, pc.y);
    println!("posterior seen by UE 1:  center ({:.2}, {:.2}), mean spread {qs:.2} m", qc.x, qc.y);
}
