//! The two outer loops: successive convex approximation for a fixed η, and
//! the Dinkelbach update of η itself.

use crate::error::{Error, Result};
use crate::params::Starts;

use super::dual::DualMultipliers;
use super::inner::{inner_solve, rate_shortfall, relative_change};
use super::network::Network;
use super::sca::{sca_update, ScaCoefficients};

#[derive(Debug, Clone)]
pub struct ScaOutcome {
    pub powers: Vec<f64>,
    pub duals: DualMultipliers,
    /// Coefficients refitted at the final powers.
    pub coefficients: ScaCoefficients,
    /// Coefficients the last inner solve was run with.
    pub surrogate: ScaCoefficients,
    pub iterations: usize,
    pub inner_iterations: usize,
    pub converged: bool,
    pub possibly_infeasible: bool,
    pub shortfall: f64,
    /// `Σr − η·P` (true rates) after every SCA round.
    pub objective: Vec<f64>,
}

/// Alternates an inner solve with a refit of the SCA coefficients until the
/// powers stop moving. Starts from the cold coefficients `a = 1, b = 0`.
pub fn sca_loop(net: &Network, eta: f64, start: &[f64]) -> Result<ScaOutcome> {
    sca_loop_from(
        net,
        eta,
        start,
        ScaCoefficients::cold(net.users()),
        DualMultipliers::initial(net),
    )
}

/// [`sca_loop`] with explicit starting coefficients and multipliers.
pub fn sca_loop_from(
    net: &Network,
    eta: f64,
    start: &[f64],
    coefficients: ScaCoefficients,
    duals: DualMultipliers,
) -> Result<ScaOutcome> {
    let settings = net.settings();
    let mut powers = start.to_vec();
    let mut coefficients = coefficients;
    let mut surrogate = coefficients.clone();
    let mut duals = duals;
    let mut objective = Vec::new();
    let mut inner_iterations = 0;
    let mut iterations = 0;
    let mut converged = false;
    let mut possibly_infeasible = false;
    let mut infeasible_streak = 0;

    for t in 1..=settings.max_sca {
        iterations = t;
        let inner = inner_solve(net, &coefficients, eta, &powers, duals)?;
        inner_iterations += inner.iterations;
        let change = relative_change(&powers, &inner.powers, settings.p_floor);
        powers = inner.powers;
        possibly_infeasible = inner.possibly_infeasible;
        // The surrogate can be infeasible while the true problem is not
        // (always so under the cold start); refitting at the new powers
        // loosens it, so only the final round decides.
        duals = if inner
            .duals
            .lambda
            .iter()
            .any(|&l| l > settings.lambda_limit)
        {
            DualMultipliers::initial(net)
        } else {
            inner.duals
        };
        surrogate = std::mem::replace(
            &mut coefficients,
            sca_update(&net.sinr(&powers), net.gap(), settings.sinr_floor),
        );
        let rate: f64 = net.rates(&powers).iter().sum();
        objective.push(rate - eta * net.total_power(&powers));
        // Round 1 runs on the starting coefficients, which may be loose.
        infeasible_streak = if possibly_infeasible && t > 1 {
            infeasible_streak + 1
        } else {
            0
        };
        if infeasible_streak >= settings.infeasible_rounds {
            break;
        }
        if !possibly_infeasible && change < settings.tol_sca {
            converged = true;
            break;
        }
    }

    let shortfall = rate_shortfall(net, &net.rates(&powers));
    possibly_infeasible = possibly_infeasible || shortfall > settings.rate_tolerance;
    Ok(ScaOutcome {
        powers,
        duals,
        coefficients,
        surrogate,
        iterations,
        inner_iterations,
        converged,
        possibly_infeasible,
        shortfall,
        objective,
    })
}

/// One record per Dinkelbach iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    /// η used for this iteration's subproblem.
    pub eta: f64,
    /// `Σr − η·P` with true rates at the subproblem solution.
    pub residual: f64,
    /// Same residual with the SCA surrogate rates (coefficients of the
    /// last round, before refitting).
    pub surrogate_residual: f64,
    /// Energy efficiency of the subproblem solution.
    pub energy_efficiency: f64,
    pub powers: Vec<f64>,
    pub phi: Vec<f64>,
    pub lambda: Vec<f64>,
    pub sca_iterations: usize,
    pub inner_iterations: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverTrace {
    pub entries: Vec<TraceEntry>,
}

impl SolverTrace {
    pub fn etas(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.eta).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub powers: Vec<f64>,
    /// Dinkelbach parameter at termination.
    pub eta: f64,
    /// Efficiency of `powers` itself, `Σr/P`.
    pub energy_efficiency: f64,
    pub duals: DualMultipliers,
    pub coefficients: ScaCoefficients,
    pub trace: SolverTrace,
}

/// Maximizes total rate over consumed power.
///
/// Starts from `η = 0`, solves `max Σr − η·P` by SCA, and replaces η by the
/// efficiency of the result until the residual `Σr − η·P` drops below
/// `ε·η·P`.
pub fn dinkelbach_solve(net: &Network) -> Result<Solution> {
    let settings = net.settings().clone();
    let mut eta = 0.0;
    let mut start = net.uniform_start();
    let mut trace = SolverTrace::default();
    let mut previous: Option<ScaOutcome> = None;

    for t1 in 1..=settings.max_dinkelbach {
        let outcome = solve_subproblem(net, eta, &start)?;
        let rates = net.rates(&outcome.powers);
        let total_rate: f64 = rates.iter().sum();
        let total_power = net.total_power(&outcome.powers);
        let residual = total_rate - eta * total_power;
        let surrogate: f64 = net
            .surrogate_rates(&outcome.powers, &outcome.surrogate)
            .iter()
            .sum();
        trace.entries.push(TraceEntry {
            iteration: t1,
            eta,
            residual,
            surrogate_residual: surrogate - eta * total_power,
            energy_efficiency: total_rate / total_power,
            powers: outcome.powers.clone(),
            phi: outcome.duals.phi.clone(),
            lambda: outcome.duals.lambda.clone(),
            sca_iterations: outcome.iterations,
            inner_iterations: outcome.inner_iterations,
        });

        if outcome.possibly_infeasible {
            return Err(Error::PossiblyInfeasible {
                shortfall: outcome.shortfall,
                trace: Box::new(trace),
            });
        }

        if residual <= settings.epsilon * eta * total_power {
            // A negative residual means the subproblem solve fell short of
            // the previous iterate, which attains η exactly.
            let best = match previous {
                Some(prev) if residual < 0.0 => prev,
                _ => outcome,
            };
            let energy_efficiency = net.energy_efficiency(&best.powers);
            return Ok(Solution {
                powers: best.powers,
                eta,
                energy_efficiency,
                duals: best.duals,
                coefficients: best.coefficients,
                trace,
            });
        }
        eta = total_rate / total_power;
        start = outcome.powers.clone();
        previous = Some(outcome);
    }
    Err(Error::NotConverged {
        iterations: settings.max_dinkelbach,
        trace: Box::new(trace),
    })
}

/// Best SCA outcome over the configured starting points, by true objective.
fn solve_subproblem(net: &Network, eta: f64, start: &[f64]) -> Result<ScaOutcome> {
    let mut best = sca_loop(net, eta, start)?;
    if net.settings().starts == Starts::UniformAndDominant && net.r_min() <= 0.0 {
        for user in 0..net.users() {
            let dominant = dominant_start(net, user);
            let coefficients =
                sca_update(&net.sinr(&dominant), net.gap(), net.settings().sinr_floor);
            let candidate = sca_loop_from(
                net,
                eta,
                &dominant,
                coefficients,
                DualMultipliers::initial(net),
            )?;
            if objective(net, eta, &candidate) > objective(net, eta, &best) {
                best = candidate;
            }
        }
    }
    Ok(best)
}

fn objective(net: &Network, eta: f64, outcome: &ScaOutcome) -> f64 {
    net.rates(&outcome.powers).iter().sum::<f64>() - eta * net.total_power(&outcome.powers)
}

/// `user` holds almost all of its cell's budget; its cell-mates sit at the
/// floor and other cells split evenly.
fn dominant_start(net: &Network, user: usize) -> Vec<f64> {
    let floor = net.settings().p_floor;
    let cell = net.cell_of(user);
    let mut p = net.uniform_start();
    let mates = net.members(cell);
    for &m in mates {
        p[m] = floor;
    }
    p[user] = net.p_max() - floor * (mates.len() as f64 - 1.0).max(0.0);
    p
}
