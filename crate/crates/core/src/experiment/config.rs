use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::multicell::MultiCellParams;
use crate::params::{PowerDual, Starts, StepRule, SystemParams};

/// The experiments the runner knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// One realization; the Dinkelbach trace is kept.
    Convergence,
    /// Mean efficiency against the antenna count.
    EeVsM,
    /// Mean efficiency against the user count.
    EeVsK,
    /// Mean transmit power per user against the antenna count.
    PowerVsM,
    /// Realized multi-cell efficiency against the antenna count, next to the
    /// single-cell efficiency.
    MultiCellVsM,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::Convergence,
        Scenario::EeVsM,
        Scenario::EeVsK,
        Scenario::PowerVsM,
        Scenario::MultiCellVsM,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Convergence => "convergence",
            Scenario::EeVsM => "ee_vs_m",
            Scenario::EeVsK => "ee_vs_k",
            Scenario::PowerVsM => "power_vs_m",
            Scenario::MultiCellVsM => "multicell_vs_m",
        }
    }

    /// Whether the sweep runs over users (otherwise over antennas).
    pub fn sweeps_users(self) -> bool {
        self == Scenario::EeVsK
    }

    fn default_sweep(self, system: &SystemParams) -> Vec<usize> {
        match self {
            Scenario::Convergence => vec![system.antennas],
            Scenario::EeVsK => (1..=20).collect(),
            Scenario::MultiCellVsM => (20..=200).step_by(20).collect(),
            Scenario::EeVsM | Scenario::PowerVsM => (10..=200).step_by(10).collect(),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
                Error::config(
                    "scenario",
                    format!(
                        "unknown scenario `{s}`, expected one of {}",
                        names.join(", ")
                    ),
                )
            })
    }
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    /// Antenna counts, or user counts for [`Scenario::EeVsK`].
    pub sweep: Vec<usize>,
    /// Channel realizations per sweep point.
    pub trials: usize,
    /// Trial `t` uses seed `seed + t`.
    pub seed: u64,
    pub output: PathBuf,
    /// Parameters before the swept dimension is applied.
    pub system: SystemParams,
    pub cells: usize,
    pub pilot_power: f64,
    /// Pilot length; `None` uses the number of users per cell.
    pub pilot_length: Option<usize>,
    pub ring_factor: f64,
}

pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_CELLS: usize = 7;
pub const DEFAULT_OUTPUT: &str = "results.csv";

impl ExperimentConfig {
    /// Reference parameters for `scenario` with its default sweep.
    pub fn new(scenario: Scenario) -> Self {
        let mut system = SystemParams::default();
        if scenario == Scenario::EeVsK {
            system.antennas = 82;
        }
        let defaults = MultiCellParams::new(DEFAULT_CELLS, system.clone());
        ExperimentConfig {
            scenario,
            sweep: scenario.default_sweep(&system),
            trials: if scenario == Scenario::Convergence {
                1
            } else {
                DEFAULT_TRIALS
            },
            seed: 0,
            output: PathBuf::from(DEFAULT_OUTPUT),
            system,
            cells: DEFAULT_CELLS,
            pilot_power: defaults.pilot_power,
            pilot_length: None,
            ring_factor: defaults.ring_factor,
        }
    }

    /// System parameters at one sweep point.
    pub fn system_at(&self, value: usize) -> SystemParams {
        let mut p = self.system.clone();
        if self.scenario.sweeps_users() {
            p.users = value;
        } else {
            p.antennas = value;
        }
        p
    }

    /// Multi-cell parameters at one sweep point.
    pub fn multicell_at(&self, value: usize) -> MultiCellParams {
        let system = self.system_at(value);
        MultiCellParams {
            cells: self.cells,
            pilot_length: self.pilot_length.unwrap_or(system.users),
            system,
            pilot_power: self.pilot_power,
            ring_factor: self.ring_factor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if self.sweep.is_empty() {
            return Err(Error::config("sweep", "must not be empty"));
        }
        if self.sweep.contains(&0) {
            return Err(Error::config("sweep", "values must be at least 1"));
        }
        for &v in &self.sweep {
            let checked = if self.scenario == Scenario::MultiCellVsM {
                self.multicell_at(v).validate()
            } else {
                self.system_at(v).validate()
            };
            checked.map_err(|e| match e {
                Error::InvalidParam { name, reason } => Error::config(name, reason),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Result<Self> {
        self.trials = trials;
        self.validate()?;
        Ok(self)
    }

    pub fn with_output(mut self, output: impl Into<PathBuf>) -> Self {
        self.output = output.into();
        self
    }
}

/// Parses flat `key = value` lines. `#` starts a comment; blank lines are
/// skipped. Unset keys keep the reference values of the scenario.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut entries = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {}", n + 1), "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(Error::config(format!("line {}", n + 1), "empty key"));
        }
        if entries.insert(key.to_string(), value.to_string()).is_some() {
            return Err(Error::config(key, "given more than once"));
        }
    }

    let scenario = match entries.remove("scenario") {
        Some(v) => v.parse()?,
        None => return Err(Error::config("scenario", "missing")),
    };
    let mut cfg = ExperimentConfig::new(scenario);
    let mut sweep = None;
    for (key, value) in &entries {
        let k = key.as_str();
        let v = value.as_str();
        let s = &mut cfg.system;
        match k {
            "sweep" => sweep = Some(parse_sweep(v)?),
            "trials" => cfg.trials = num(k, v)?,
            "seed" => cfg.seed = num(k, v)?,
            "output" => cfg.output = PathBuf::from(v),
            "antennas" => s.antennas = num(k, v)?,
            "users" => s.users = num(k, v)?,
            "bandwidth" => s.bandwidth = num(k, v)?,
            "noise_dbm_per_hz" => s.noise_dbm_per_hz = num(k, v)?,
            "shadow_std_db" => s.shadow_std_db = num(k, v)?,
            "p_max" => s.p_max = num(k, v)?,
            "p_antenna" => s.p_antenna = num(k, v)?,
            "p_fixed" => s.p_fixed = num(k, v)?,
            "p_user" => s.p_user = num(k, v)?,
            "r_min" => s.r_min = num(k, v)?,
            "ber_target" => s.ber_target = num(k, v)?,
            "cell_radius" => s.cell_radius = num(k, v)?,
            "min_distance" => s.min_distance = num(k, v)?,
            "path_loss_exponent" => s.path_loss_exponent = num(k, v)?,
            "epsilon" => s.solver.epsilon = num(k, v)?,
            "step_phi" => s.solver.step_phi = num(k, v)?,
            "step_lambda" => s.solver.step_lambda = num(k, v)?,
            "step_rule" => {
                s.solver.step_rule = match v {
                    "constant" => StepRule::Constant,
                    "diminishing" => StepRule::Diminishing,
                    _ => return Err(Error::config(k, "expected `constant` or `diminishing`")),
                }
            }
            "power_dual" => {
                s.solver.power_dual = match v {
                    "scale_kkt" => PowerDual::ScaleKkt,
                    "subgradient" => PowerDual::Subgradient,
                    _ => return Err(Error::config(k, "expected `scale_kkt` or `subgradient`")),
                }
            }
            "starts" => {
                s.solver.starts = match v {
                    "uniform" => Starts::Uniform,
                    "uniform_and_dominant" => Starts::UniformAndDominant,
                    _ => {
                        return Err(Error::config(
                            k,
                            "expected `uniform` or `uniform_and_dominant`",
                        ))
                    }
                }
            }
            "initial_multiplier" => s.solver.initial_multiplier = num(k, v)?,
            "tol_power" => s.solver.tol_power = num(k, v)?,
            "tol_sca" => s.solver.tol_sca = num(k, v)?,
            "tol_dual" => s.solver.tol_dual = num(k, v)?,
            "max_dinkelbach" => s.solver.max_dinkelbach = num(k, v)?,
            "max_sca" => s.solver.max_sca = num(k, v)?,
            "max_inner" => s.solver.max_inner = num(k, v)?,
            "p_floor" => s.solver.p_floor = num(k, v)?,
            "sinr_floor" => s.solver.sinr_floor = num(k, v)?,
            "lambda_limit" => s.solver.lambda_limit = num(k, v)?,
            "rate_tolerance" => s.solver.rate_tolerance = num(k, v)?,
            "infeasible_rounds" => s.solver.infeasible_rounds = num(k, v)?,
            "cells" => cfg.cells = num(k, v)?,
            "pilot_power" => cfg.pilot_power = num(k, v)?,
            "pilot_length" => cfg.pilot_length = Some(num(k, v)?),
            "ring_factor" => cfg.ring_factor = num(k, v)?,
            _ => return Err(Error::config(k, "unknown key")),
        }
    }
    cfg.sweep = match sweep {
        Some(s) => s,
        None => cfg.scenario.default_sweep(&cfg.system),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

/// `start:step:stop` (inclusive) or a comma-separated list.
pub fn parse_sweep(value: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = value.split(':').map(str::trim).collect();
    let values = match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop): (usize, usize, usize) = (
                num("sweep", start)?,
                num("sweep", step)?,
                num("sweep", stop)?,
            );
            if step == 0 {
                return Err(Error::config("sweep", "step must be positive"));
            }
            if stop < start {
                return Err(Error::config("sweep", "stop is below start"));
            }
            (start..=stop).step_by(step).collect()
        }
        [list] => list
            .split(',')
            .map(|v| num("sweep", v.trim()))
            .collect::<Result<Vec<usize>>>()?,
        _ => {
            return Err(Error::config(
                "sweep",
                "expected `start:step:stop` or a list",
            ))
        }
    };
    if values.is_empty() {
        return Err(Error::config("sweep", "must not be empty"));
    }
    Ok(values)
}
