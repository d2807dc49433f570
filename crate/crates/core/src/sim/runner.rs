use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::config::ExperimentConfig;
use crate::channel::draw_channel;
use crate::codebook::Codebooks;
use crate::linkeval::{evaluate_sinr, RateRecord};
use crate::scenario::{build_beliefs, sample_scenario, ErrorModel, ScenarioConfig};
use crate::seed::{derive_seed, rng_from, tag};
use crate::selection::{select_all, BeamAssignment, SelectionSetup, StrategyKind};
use crate::{Error, Result};

/// Scenario redraws allowed per trial before it is skipped.
pub const MAX_SCENARIO_ATTEMPTS: u64 = 100;

pub const CSV_HEADER: &str = "strategy,sweep_variable,sweep_value,mean_rate_per_ue,std_err,trials";

/// Aggregate over all trials of one (strategy, sweep value) pair.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRecord {
    pub strategy: StrategyKind,
    pub sweep_variable: super::SweepVariable,
    pub sweep_value: f64,
    /// Bits/s/Hz, averaged over UEs and trials.
    pub mean_rate_per_ue: f64,
    pub std_err: f64,
    /// Trials that completed; skipped trials are excluded.
    pub trials: usize,
    pub wall_time: Duration,
}

impl ResultRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.strategy, self.sweep_variable, self.sweep_value, self.mean_rate_per_ue, self.std_err, self.trials
        )
    }
}

/// Everything one pipeline pass produced.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub assignment: BeamAssignment,
    pub rates: RateRecord,
    /// Scenario draws used, 1 unless the geometry was degenerate.
    pub attempts: u64,
}

/// Scenario-level state shared by every trial at one sweep point.
struct SweepPoint {
    scenario: ScenarioConfig,
    errors: ErrorModel,
    codebooks: Codebooks,
}

impl SweepPoint {
    fn new(cfg: &ExperimentConfig, value: f64) -> Self {
        let (scenario, radii) = cfg.at(value);
        let errors = ErrorModel::per_observer(scenario.num_paths, &radii, cfg.bs_error_radius);
        let codebooks = Codebooks::for_scenario(&scenario);
        SweepPoint { scenario, errors, codebooks }
    }

    fn run(&self, cfg: &ExperimentConfig, strategy: StrategyKind, trial: u64) -> Result<TrialOutcome> {
        for attempt in 0..MAX_SCENARIO_ATTEMPTS {
            match self.attempt(cfg, strategy, derive_seed(cfg.seed, &[trial, attempt])) {
                Err(Error::DegenerateGeometry(_)) => continue,
                Err(e) => return Err(e),
                Ok((assignment, rates)) => return Ok(TrialOutcome { assignment, rates, attempts: attempt + 1 }),
            }
        }
        Err(Error::DegenerateGeometry(format!("trial {trial}: no valid scenario in {MAX_SCENARIO_ATTEMPTS} draws")))
    }

    fn attempt(&self, cfg: &ExperimentConfig, strategy: StrategyKind, seed: u64) -> Result<(BeamAssignment, RateRecord)> {
        let sc = &self.scenario;
        let truth = sample_scenario(sc, &mut rng_from(derive_seed(seed, &[tag::SCENARIO])));
        let beliefs = build_beliefs(&truth, &self.errors, &mut rng_from(derive_seed(seed, &[tag::BELIEFS])));
        let setup = SelectionSetup {
            config: sc,
            codebooks: &self.codebooks,
            mc_iterations: cfg.monte_carlo_iterations,
            seed: derive_seed(seed, &[tag::SELECTION]),
        };
        let assignment = select_all(&beliefs, setup, strategy)?;
        let mut rng = rng_from(derive_seed(seed, &[tag::CHANNEL]));
        let channels = truth
            .iter()
            .map(|p| draw_channel(p, &sc.path_power_profile, sc.n_bs, sc.n_ue, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        let rates = evaluate_sinr(&channels, &assignment, &self.codebooks, sc.noise_power);
        Ok((assignment, rates))
    }
}

/// One full pipeline pass, returning the per-UE rates.
///
/// The random streams depend only on `(cfg.seed, trial)`, so different
/// strategies and sweep values see the same underlying draws.
pub fn run_trial(cfg: &ExperimentConfig, sweep_value: f64, strategy: StrategyKind, trial: u64) -> Result<Vec<f64>> {
    Ok(run_trial_detailed(cfg, sweep_value, strategy, trial)?.rates.rates)
}

/// [`run_trial`] with the chosen beams and SINRs.
pub fn run_trial_detailed(
    cfg: &ExperimentConfig,
    sweep_value: f64,
    strategy: StrategyKind,
    trial: u64,
) -> Result<TrialOutcome> {
    cfg.validate()?;
    SweepPoint::new(cfg, sweep_value).run(cfg, strategy, trial)
}

/// Mean and standard error of the mean; the error is 0 for fewer than two samples.
pub fn mean_and_std_err(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs every (strategy, sweep value) pair, trials in parallel on the current
/// rayon pool, and writes one CSV row per pair to `out` as soon as it is done.
///
/// Trials whose geometry stays degenerate after [`MAX_SCENARIO_ATTEMPTS`]
/// draws are skipped and not counted.
pub fn run_experiment(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    let io_err = |source| Error::Io { path: out.unwrap_or(Path::new("")).to_owned(), source };
    let mut writer = match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
            writeln!(w, "{CSV_HEADER}").map_err(io_err)?;
            Some(w)
        }
        None => None,
    };

    let mut records = Vec::with_capacity(cfg.strategies.len() * cfg.values.len());
    for &strategy in &cfg.strategies {
        for &value in &cfg.values {
            let start = Instant::now();
            let point = SweepPoint::new(cfg, value);
            let outcomes: Vec<Result<TrialOutcome>> =
                (0..cfg.trials as u64).into_par_iter().map(|t| point.run(cfg, strategy, t)).collect();
            let mut per_trial = Vec::with_capacity(outcomes.len());
            for o in outcomes {
                match o {
                    Ok(o) => per_trial.push(o.rates.mean_rate()),
                    Err(Error::DegenerateGeometry(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            let (mean_rate_per_ue, std_err) = mean_and_std_err(&per_trial);
            let rec = ResultRecord {
                strategy,
                sweep_variable: cfg.sweep,
                sweep_value: value,
                mean_rate_per_ue,
                std_err,
                trials: per_trial.len(),
                wall_time: start.elapsed(),
            };
            if let Some(w) = writer.as_mut() {
                writeln!(w, "{}", rec.csv_row()).and_then(|_| w.flush()).map_err(io_err)?;
            }
            records.push(rec);
        }
    }
    Ok(records)
}
