//! Seeded Monte-Carlo experiments and their CSV output.
//!
//! A configuration names a scenario, a sweep and a trial count. Trial `t`
//! at every sweep point draws its channels from seed `seed + t`; trials run
//! in parallel but are reduced in seed order, so a configuration fully
//! determines the output bytes. Trials whose solve fails are counted and
//! left out of the mean.
//!
//! ```
//! use mimo_ee::experiment::{parse_config, run_scenario};
//!
//! let cfg = parse_config("scenario = ee_vs_m\nsweep = 40,80\ntrials = 2\nr_min = 0").unwrap();
//! let result = run_scenario(&cfg).unwrap();
//! assert_eq!(result.rows.len(), 2);
//! assert!(result.rows.iter().all(|r| r.trials == 2));
//! ```

mod config;

pub use config::{
    parse_config, parse_sweep, ExperimentConfig, Scenario, DEFAULT_CELLS, DEFAULT_OUTPUT,
    DEFAULT_TRIALS,
};

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::multicell::{evaluate_on_true, layout_and_draw, ls_estimate, multicell_solve};
use crate::params::SystemParams;
use crate::solver::{solve, Solution, SolverTrace};
use crate::sysmodel::{draw_channels, seeded_rng};

/// Mean and standard error of the successful trials.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation over `√successes`; zero for one success.
    pub stderr: f64,
    pub successes: usize,
    pub failures: usize,
}

impl Summary {
    /// Sums in the given order; `None` marks a failed trial. The mean of no
    /// successes is NaN.
    pub fn of(values: &[Option<f64>]) -> Self {
        let ok: Vec<f64> = values.iter().flatten().copied().collect();
        let n = ok.len();
        let mean = ok.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = ok.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else if n == 1 {
            0.0
        } else {
            f64::NAN
        };
        Summary {
            mean,
            stderr,
            successes: n,
            failures: values.len() - n,
        }
    }
}

/// One sweep point of the main metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sweep: usize,
    pub summary: Summary,
    /// Trials run, successes plus failures.
    pub trials: usize,
    pub seed: u64,
    /// Per-trial metric in seed order, `None` for failures.
    pub values: Vec<Option<f64>>,
}

/// One sweep point of the multi-cell comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiCellRow {
    pub sweep: usize,
    /// Designed allocation evaluated on the true channels.
    pub realized: Summary,
    /// Efficiency the allocation was designed for, on the estimates.
    pub designed: Summary,
    /// Single cell with perfect channel knowledge, same seeds.
    pub single: Summary,
    /// `realized.mean / single.mean`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub scenario: Scenario,
    pub seed: u64,
    /// One row per sweep value, in sweep order.
    pub rows: Vec<Row>,
    /// Dinkelbach trace of the convergence run.
    pub trace: Option<SolverTrace>,
    /// Filled by the multi-cell scenario only.
    pub multicell: Vec<MultiCellRow>,
}

/// Runs every trial of every sweep point.
pub fn run_scenario(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let mut result = ExperimentResult {
        scenario: config.scenario,
        seed: config.seed,
        rows: Vec::with_capacity(config.sweep.len()),
        trace: None,
        multicell: Vec::new(),
    };
    match config.scenario {
        Scenario::Convergence => {
            let value = config.sweep[0];
            let params = config.system_at(value);
            let sol = single_cell(&params, config.seed)?;
            result
                .rows
                .push(row(value, config.seed, vec![Some(sol.energy_efficiency)]));
            result.trace = Some(sol.trace);
        }
        Scenario::EeVsM | Scenario::EeVsK | Scenario::PowerVsM => {
            let per_user_power = config.scenario == Scenario::PowerVsM;
            for &value in &config.sweep {
                let params = config.system_at(value);
                let values = trials(config, |seed| {
                    single_cell(&params, seed).ok().map(|sol| {
                        if per_user_power {
                            sol.powers.iter().sum::<f64>() / params.users as f64
                        } else {
                            sol.energy_efficiency
                        }
                    })
                });
                result.rows.push(row(value, config.seed, values));
            }
        }
        Scenario::MultiCellVsM => {
            for &value in &config.sweep {
                let mc = config.multicell_at(value);
                let outcomes = trials(config, |seed| {
                    let mut rng = seeded_rng(seed);
                    let multi = layout_and_draw(&mc, &mut rng)
                        .and_then(|ch| ls_estimate(&ch, &mc, &mut rng))
                        .and_then(|ch| {
                            let alloc = multicell_solve(&mc, &ch)?;
                            let realized = evaluate_on_true(&mc, &ch, &alloc)?;
                            Ok((realized.energy_efficiency, alloc.energy_efficiency))
                        })
                        .ok();
                    let single = single_cell(&mc.system, seed)
                        .ok()
                        .map(|s| s.energy_efficiency);
                    Some((multi, single))
                });
                let pick = |f: fn(&MultiCellTrial) -> Option<f64>| {
                    outcomes
                        .iter()
                        .map(|o| o.as_ref().and_then(f))
                        .collect::<Vec<_>>()
                };
                let realized_values = pick(|o| o.0.map(|m| m.0));
                let realized = Summary::of(&realized_values);
                let designed = Summary::of(&pick(|o| o.0.map(|m| m.1)));
                let single = Summary::of(&pick(|o| o.1));
                result.multicell.push(MultiCellRow {
                    sweep: value,
                    ratio: realized.mean / single.mean,
                    realized,
                    designed,
                    single,
                });
                result.rows.push(row(value, config.seed, realized_values));
            }
        }
    }
    Ok(result)
}

/// Realized and designed multi-cell efficiency, and the single-cell one.
type MultiCellTrial = (Option<(f64, f64)>, Option<f64>);

fn single_cell(params: &SystemParams, seed: u64) -> Result<Solution> {
    let channels = draw_channels(params, &mut seeded_rng(seed));
    solve(params, &channels)
}

/// Per-trial values in seed order.
fn trials<T: Send>(config: &ExperimentConfig, f: impl Fn(u64) -> T + Sync) -> Vec<T> {
    (0..config.trials as u64)
        .into_par_iter()
        .map(|t| f(config.seed.wrapping_add(t)))
        .collect()
}

fn row(sweep: usize, seed: u64, values: Vec<Option<f64>>) -> Row {
    Row {
        sweep,
        summary: Summary::of(&values),
        trials: values.len(),
        seed,
        values,
    }
}

pub const HEADER: [&str; 6] = ["sweep", "mean", "stderr", "trials", "failures", "seed"];
pub const TRACE_HEADER: [&str; 3] = ["t1", "eta", "residual"];
pub const MULTICELL_HEADER: [&str; 10] = [
    "sweep",
    "realized_mean",
    "realized_stderr",
    "realized_failures",
    "designed_mean",
    "designed_stderr",
    "single_mean",
    "single_stderr",
    "single_failures",
    "ratio",
];

/// Nine significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.8e}")
}

/// Writes the main table to `path`.
pub fn emit_csv(result: &ExperimentResult, path: &Path) -> Result<()> {
    let records = result.rows.iter().map(|r| {
        vec![
            r.sweep.to_string(),
            format_float(r.summary.mean),
            format_float(r.summary.stderr),
            r.trials.to_string(),
            r.summary.failures.to_string(),
            r.seed.to_string(),
        ]
    });
    write_table(path, &HEADER, records)
}

/// `trace.csv` next to `path`, when the result carries a trace.
pub fn emit_trace_csv(result: &ExperimentResult, path: &Path) -> Result<Option<PathBuf>> {
    let Some(trace) = &result.trace else {
        return Ok(None);
    };
    let out = sibling(path, "trace.csv");
    let records = trace.entries.iter().map(|e| {
        vec![
            e.iteration.to_string(),
            format_float(e.eta),
            format_float(e.residual),
        ]
    });
    write_table(&out, &TRACE_HEADER, records)?;
    Ok(Some(out))
}

/// `multicell.csv` next to `path`, for the multi-cell scenario.
pub fn emit_multicell_csv(result: &ExperimentResult, path: &Path) -> Result<Option<PathBuf>> {
    if result.multicell.is_empty() {
        return Ok(None);
    }
    let out = sibling(path, "multicell.csv");
    let records = result.multicell.iter().map(|r| {
        vec![
            r.sweep.to_string(),
            format_float(r.realized.mean),
            format_float(r.realized.stderr),
            r.realized.failures.to_string(),
            format_float(r.designed.mean),
            format_float(r.designed.stderr),
            format_float(r.single.mean),
            format_float(r.single.stderr),
            r.single.failures.to_string(),
            format_float(r.ratio),
        ]
    });
    write_table(&out, &MULTICELL_HEADER, records)?;
    Ok(Some(out))
}

/// Main table plus whichever side tables the scenario produces.
pub fn emit_all(result: &ExperimentResult, path: &Path) -> Result<Vec<PathBuf>> {
    emit_csv(result, path)?;
    let mut written = vec![path.to_path_buf()];
    written.extend(emit_trace_csv(result, path)?);
    written.extend(emit_multicell_csv(result, path)?);
    Ok(written)
}

fn sibling(path: &Path, name: &str) -> PathBuf {
    path.parent()
        .map_or_else(|| PathBuf::from(name), |dir| dir.join(name))
}

fn write_table(
    path: &Path,
    header: &[&str],
    records: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header).map_err(csv_err)?;
    for r in records {
        w.write_record(&r).map_err(csv_err)?;
    }
    let mut file = w.into_inner().map_err(|e| io_err(e.into_error()))?;
    file.flush().map_err(io_err)
}
