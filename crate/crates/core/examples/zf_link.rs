//! Hybrid combining: effective channel, ZF digital stage, SINR and reconstruction.
//!
//! Run: cargo run --release --example zf_link

use coordbeam::channel::complex_gaussian;
use coordbeam::seed::rng_from;
use coordbeam::{
    draw_channel, effective_channel, evaluate_sinr, reconstruct_signal, sample_scenario, BeamAssignment, BeamPair,
    Codebooks, HybridCombiner, ScenarioConfig, C64,
};
use nalgebra::DVector;

fn main() -> coordbeam::Result<()> {
    let cfg = ScenarioConfig::desk();
    let cbs = Codebooks::for_scenario(&cfg);
    let mut rng = rng_from(21);
    let truth = sample_scenario(&cfg, &mut rng);
    let channels = truth
        .iter()
        .map(|p| draw_channel(p, &cfg.path_power_profile, cfg.n_bs, cfg.n_ue, &mut rng))
        .collect::<coordbeam::Result<Vec<_>>>()?;
    let asg = BeamAssignment(vec![BeamPair::new(7, 8), BeamPair::new(9, 8)]);

    let h = effective_channel(&channels, &asg, &cbs);
    let comb = HybridCombiner::zero_forcing(&channels, &asg, &cbs);
    println!("effective channel:{h:.3}");
    println!("W_D * H_eff:{:.3}", &comb.digital * &h);

    let r = evaluate_sinr(&channels, &asg, &cbs, cfg.noise_power);
    for u in 0..2 {
        println!("UE {u}: SINR {:.2} dB, rate {:.3} bits/s/Hz", 10.0 * r.sinr[u].log10(), r.rates[u]);
    }

    let s = [C64::new(1.0, 0.0), C64::new(0.0, -1.0)];
    let clean = reconstruct_signal(&channels, &asg, &s, &DVector::zeros(cfg.n_bs), &cbs);
    let noise = DVector::from_fn(cfg.n_bs, |_, _| complex_gaussian(cfg.noise_power, &mut rng));
    let noisy = reconstruct_signal(&channels, &asg, &s, &noise, &cbs);
    for u in 0..2 {
        println!("s{u} = {}  noiseless {:.6}  noisy {:.3}", s[u], clean[u], noisy[u]);
    }
    Ok(())
}
