//! Innermost loop: interference feedback, closed-form power update, and the
//! multiplier updates, for fixed SCA coefficients and a fixed η.

use crate::error::{Error, Result};
use crate::params::{PowerDual, StepRule};

use super::dual::{subgradient_step, DualMultipliers};
use super::network::Network;
use super::sca::ScaCoefficients;

/// Interference plus noise measured by every user and fed back to the
/// base station: `I_k = Σ_{u≠k} p_u·|g_k · w_u|² + σ²`.
pub fn interference_feedback(net: &Network, powers: &[f64]) -> Vec<f64> {
    let g = net.gains();
    (0..net.users())
        .map(|k| {
            let row = g.row(k);
            let mut acc = net.noise();
            for (u, (&gain, &p)) in row.iter().zip(powers).enumerate() {
                if u != k {
                    acc += gain * p;
                }
            }
            acc
        })
        .collect()
}

/// Closed-form stationary power for every user given the others' feedback:
///
/// ```text
/// p_i = (λ_i+1)·(B/ln2)·a_i / ( (B/ln2)·Σ_{k≠i} (λ_k+1)·a_k·|g_k·w_i|² / I_k + η + φ_cell(i) )
/// ```
///
/// clamped below at the power floor. The cross-gain is user `k`'s channel
/// against user `i`'s beam: the damage `i` does to everyone else.
pub fn power_update(
    net: &Network,
    sca: &ScaCoefficients,
    duals: &DualMultipliers,
    eta: f64,
    interference: &[f64],
) -> Result<Vec<f64>> {
    let n = net.users();
    let c = net.rate_scale();
    let floor = net.settings().p_floor;
    let g = net.gains();
    let weight: Vec<f64> = (0..n)
        .map(|k| (duals.lambda[k] + 1.0) * sca.a[k] / interference[k])
        .collect();
    (0..n)
        .map(|i| {
            let mut penalty = 0.0;
            for (k, &wk) in weight.iter().enumerate() {
                if k != i {
                    penalty += wk * g.get(k, i);
                }
            }
            let den = c * penalty + eta + duals.phi[net.cell_of(i)];
            if den.is_nan() || den <= 0.0 {
                return Err(Error::UnboundedUpdate { user: i });
            }
            let num = (duals.lambda[i] + 1.0) * c * sca.a[i];
            Ok((num / den).max(0.0).max(floor))
        })
        .collect()
}

/// Rescales the active users of each cell by the common factor that
/// maximizes the Lagrangian along that direction, subject to the cell's
/// power budget, and returns the resulting power multiplier per cell.
///
/// With negligible noise the surrogate objective is almost invariant to a
/// common scaling of the powers, so the fixed-point iteration alone creeps
/// towards the optimal scale. Fixed points of the closed-form update already
/// satisfy this one-dimensional condition, so the step does not move them.
pub(crate) fn scale_step(
    net: &Network,
    powers: &mut [f64],
    sca: &ScaCoefficients,
    lambda: &[f64],
    eta: f64,
) -> Vec<f64> {
    let n = net.users();
    let c = net.rate_scale();
    let floor = net.settings().p_floor;
    let g = net.gains();
    let weight: Vec<f64> = (0..n).map(|k| (lambda[k] + 1.0) * sca.a[k]).collect();
    let mut phi = vec![0.0; net.cells()];
    let mut active = vec![false; n];
    let mut coupled = vec![0.0; n];
    let mut rest = vec![0.0; n];

    for (cell, phi_cell) in phi.iter_mut().enumerate() {
        let members = net.members(cell);
        active.iter_mut().for_each(|a| *a = false);
        let mut active_sum = 0.0;
        let mut inactive_sum = 0.0;
        let mut largest: f64 = 0.0;
        for &i in members {
            if powers[i] > floor * (1.0 + 1e-9) {
                active[i] = true;
                active_sum += powers[i];
                largest = largest.max(powers[i]);
            } else {
                inactive_sum += powers[i];
            }
        }
        if active_sum == 0.0 {
            continue;
        }
        // I_k(s) = s·coupled_k + rest_k
        for k in 0..n {
            let row = g.row(k);
            let (mut a, mut b) = (0.0, net.noise());
            for u in 0..n {
                if u != k {
                    if active[u] {
                        a += row[u] * powers[u];
                    } else {
                        b += row[u] * powers[u];
                    }
                }
            }
            coupled[k] = a;
            rest[k] = b;
        }
        let own: f64 = members
            .iter()
            .filter(|&&i| active[i])
            .map(|&i| weight[i])
            .sum();
        let slope = |s: f64| {
            let mut d = c * own - eta * s * active_sum;
            for k in 0..n {
                if coupled[k] > 0.0 {
                    d -= c * weight[k] * s * coupled[k] / (s * coupled[k] + rest[k]);
                }
            }
            d
        };

        let s_max = ((net.p_max() - inactive_sum) / active_sum).max(f64::MIN_POSITIVE);
        let d_max = slope(s_max);
        let s = if d_max >= 0.0 {
            *phi_cell = d_max / (s_max * active_sum);
            s_max
        } else {
            let s_min = (floor / largest).min(s_max);
            if slope(s_min) <= 0.0 {
                s_min
            } else {
                let (mut lo, mut hi) = (s_min.ln(), s_max.ln());
                while hi - lo > 1e-12 {
                    let mid = 0.5 * (lo + hi);
                    if slope(mid.exp()) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                (0.5 * (lo + hi)).exp()
            }
        };
        for &i in members {
            if active[i] {
                powers[i] = (powers[i] * s).max(floor);
            }
        }
    }
    phi
}

#[derive(Debug, Clone)]
pub struct InnerOutcome {
    pub powers: Vec<f64>,
    pub duals: DualMultipliers,
    pub iterations: usize,
    /// Powers and multipliers settled within tolerance before the cap.
    pub converged: bool,
    /// A multiplier blew up, or the cap was reached with a constraint still violated.
    pub possibly_infeasible: bool,
    /// Worst relative rate shortfall `max_k (R^min − r̂_k)/R^min`, at least 0.
    pub shortfall: f64,
}

/// Repeats feedback → closed-form update → multiplier step until powers and
/// multipliers settle, or the iteration cap is hit.
pub fn inner_solve(
    net: &Network,
    sca: &ScaCoefficients,
    eta: f64,
    start: &[f64],
    duals: DualMultipliers,
) -> Result<InnerOutcome> {
    let settings = net.settings();
    let floor = settings.p_floor;
    let mut powers: Vec<f64> = start.iter().map(|&p| p.max(floor)).collect();
    let mut duals = duals;
    let mut converged = false;
    let mut blown = false;
    let mut iterations = 0;

    for t in 1..=settings.max_inner {
        iterations = t;
        let interference = interference_feedback(net, &powers);
        let mut next = power_update(net, sca, &duals, eta, &interference)?;
        let exact_phi = match settings.power_dual {
            PowerDual::ScaleKkt => Some(scale_step(net, &mut next, sca, &duals.lambda, eta)),
            PowerDual::Subgradient => None,
        };
        let rates = net.surrogate_rates(&next, sca);
        let step_scale = match settings.step_rule {
            StepRule::Constant => 1.0,
            StepRule::Diminishing => 1.0 / (t as f64).sqrt(),
        };
        let mut next_duals = subgradient_step(&duals, net, &next, &rates, step_scale);
        if let Some(phi) = exact_phi {
            next_duals.phi = phi;
        }

        let power_change = relative_change(&powers, &next, floor);
        let dual_change = duals.distance(&next_duals);
        powers = next;
        duals = next_duals;

        if duals.lambda.iter().any(|&l| l > settings.lambda_limit) {
            blown = true;
            break;
        }
        if power_change < settings.tol_power
            && dual_change < settings.tol_dual
            && rate_shortfall(net, &rates) <= settings.rate_tolerance
        {
            converged = true;
            break;
        }
    }

    let shortfall = rate_shortfall(net, &net.surrogate_rates(&powers, sca));
    let over_budget = net
        .cell_powers(&powers)
        .iter()
        .any(|&p| p > net.p_max() * (1.0 + settings.rate_tolerance));
    let possibly_infeasible =
        blown || (!converged && (shortfall > settings.rate_tolerance || over_budget));
    Ok(InnerOutcome {
        powers,
        duals,
        iterations,
        converged,
        possibly_infeasible,
        shortfall,
    })
}

pub(crate) fn rate_shortfall(net: &Network, rates: &[f64]) -> f64 {
    if net.r_min() <= 0.0 {
        return 0.0;
    }
    rates
        .iter()
        .map(|&r| (net.r_min() - r) / net.r_min())
        .fold(0.0, f64::max)
}

pub(crate) fn relative_change(old: &[f64], new: &[f64], floor: f64) -> f64 {
    old.iter()
        .zip(new)
        .map(|(&a, &b)| (a - b).abs() / a.max(floor))
        .fold(0.0, f64::max)
}
