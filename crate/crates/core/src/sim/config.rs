use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::scenario::{Point2, Rect, ScenarioConfig, BLOCKAGE_PROFILE, STRONG_LOS_PROFILE};
use crate::selection::StrategyKind;
use crate::{Error, Result};

/// Quantity varied across the rows of an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    ClusterRadius,
    /// Error radius of every observer except the most informed one (UE 0).
    ErrorRadiusLessInformed,
    ErrorRadiusAll,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 3] =
        [SweepVariable::ClusterRadius, SweepVariable::ErrorRadiusLessInformed, SweepVariable::ErrorRadiusAll];

    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::ClusterRadius => "cluster_radius",
            SweepVariable::ErrorRadiusLessInformed => "error_radius_less_informed",
            SweepVariable::ErrorRadiusAll => "error_radius_all",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepVariable::ALL
            .into_iter()
            .find(|v| v.name() == s.trim())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown sweep variable '{s}'")))
    }
}

/// Named starting points for an [`ExperimentConfig`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// 64 antennas, 64 beams, 10000 trials, 64 Monte-Carlo iterations.
    Paper,
    /// 16 antennas, 16 beams, 500 trials, 32 Monte-Carlo iterations.
    Desk,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "paper" => Ok(Preset::Paper),
            "desk" => Ok(Preset::Desk),
            other => Err(Error::InvalidConfig(format!("unknown preset '{other}'"))),
        }
    }
}

/// Full description of one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    pub strategies: Vec<StrategyKind>,
    pub sweep: SweepVariable,
    pub values: Vec<f64>,
    /// Error radius of each observer's view of every UE's reflector and UE
    /// nodes, UE 0 first. Empty means all zero.
    pub error_radii: Vec<f64>,
    pub bs_error_radius: f64,
    pub trials: usize,
    pub monte_carlo_iterations: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn preset(p: Preset) -> Self {
        let (scenario, trials, monte_carlo_iterations) = match p {
            Preset::Paper => (ScenarioConfig::paper(), 10_000, 64),
            Preset::Desk => (ScenarioConfig::desk(), 500, 32),
        };
        ExperimentConfig {
            scenario,
            strategies: StrategyKind::ALL.to_vec(),
            sweep: SweepVariable::ClusterRadius,
            values: vec![7.0],
            error_radii: Vec::new(),
            bs_error_radius: 0.0,
            trials,
            monte_carlo_iterations,
            seed: 1,
        }
    }

    pub fn paper() -> Self {
        Self::preset(Preset::Paper)
    }

    pub fn desk() -> Self {
        Self::preset(Preset::Desk)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.monte_carlo_iterations == 0 {
            return bad("monte_carlo_iterations must be at least 1");
        }
        if self.strategies.is_empty() {
            return bad("strategies must not be empty");
        }
        if self.values.is_empty() {
            return bad("values must not be empty");
        }
        if self.values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return bad("sweep values must be finite and nonnegative");
        }
        if !self.error_radii.is_empty() && self.error_radii.len() != self.scenario.num_ues {
            return Err(Error::InvalidConfig(format!(
                "error_radii has {} entries, num_ues is {}",
                self.error_radii.len(),
                self.scenario.num_ues
            )));
        }
        if self.error_radii.iter().chain([&self.bs_error_radius]).any(|r| !(*r >= 0.0 && r.is_finite())) {
            return bad("error radii must be finite and nonnegative");
        }
        Ok(())
    }

    /// Scenario and per-observer error radii at one sweep point.
    pub fn at(&self, value: f64) -> (ScenarioConfig, Vec<f64>) {
        let k = self.scenario.num_ues;
        let mut radii = if self.error_radii.is_empty() { vec![0.0; k] } else { self.error_radii.clone() };
        let mut scenario = self.scenario.clone();
        match self.sweep {
            SweepVariable::ClusterRadius => scenario.cluster_radius = value,
            SweepVariable::ErrorRadiusLessInformed => radii.iter_mut().skip(1).for_each(|r| *r = value),
            SweepVariable::ErrorRadiusAll => radii.iter_mut().for_each(|r| *r = value),
        }
        (scenario, radii)
    }

    /// Applies `key = value` lines on top of `self`.
    ///
    /// Blank lines and `#` comments are ignored. Keys are the field names of
    /// this struct and of [`ScenarioConfig`]; points are `x, y`, the reflector
    /// region is `x_min, x_max, y_min, y_max`, lists are comma separated.
    /// `path_power_profile` also accepts `strong_los` and `blockage`.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { line: i + 1, msg };
            let (key, value) = line.split_once('=').ok_or_else(|| parse_err(format!("expected key = value, got '{line}'")))?;
            self.set(key.trim(), value.trim()).map_err(|e| match e {
                Error::InvalidConfig(msg) => parse_err(msg),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
        self.apply_str(&text)
    }

    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let s = &mut self.scenario;
        match key {
            "num_ues" => s.num_ues = num(key, value)?,
            "num_paths" => s.num_paths = num(key, value)?,
            "cluster_center" => s.cluster_center = point(key, value)?,
            "cluster_radius" => s.cluster_radius = num(key, value)?,
            "bs_position" => s.bs_position = point(key, value)?,
            "reflector_region" => {
                let v: Vec<f64> = list(key, value)?;
                let [x_min, x_max, y_min, y_max] = v[..] else {
                    return Err(Error::InvalidConfig(format!("{key} needs 4 numbers")));
                };
                s.reflector_region = Rect { x_min, x_max, y_min, y_max };
            }
            "path_power_profile" => {
                s.path_power_profile = match value {
                    "strong_los" => STRONG_LOS_PROFILE.to_vec(),
                    "blockage" => BLOCKAGE_PROFILE.to_vec(),
                    _ => list(key, value)?,
                }
            }
            "noise_power" => s.noise_power = num(key, value)?,
            "n_ue" => s.n_ue = num(key, value)?,
            "n_bs" => s.n_bs = num(key, value)?,
            "m_ue" => s.m_ue = num(key, value)?,
            "m_bs" => s.m_bs = num(key, value)?,
            "strategies" => self.strategies = list(key, value)?,
            "sweep" => self.sweep = value.parse()?,
            "values" => self.values = list(key, value)?,
            "error_radii" => self.error_radii = list(key, value)?,
            "bs_error_radius" => self.bs_error_radius = num(key, value)?,
            "trials" => self.trials = num(key, value)?,
            "monte_carlo_iterations" => self.monte_carlo_iterations = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            _ => return Err(Error::InvalidConfig(format!("unknown key '{key}'"))),
        }
        Ok(())
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::InvalidConfig(format!("bad value '{value}' for {key}")))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').filter(|t| !t.trim().is_empty()).map(|t| num(key, t)).collect()
}

fn point(key: &str, value: &str) -> Result<Point2> {
    match list::<f64>(key, value)?[..] {
        [x, y] => Ok(Point2::new(x, y)),
        _ => Err(Error::InvalidConfig(format!("{key} needs 2 numbers"))),
    }
}
