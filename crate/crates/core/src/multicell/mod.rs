//! Several cells sharing one frequency and one pilot set: layout, LS
//! channel estimation under pilot contamination, network-wide power
//! allocation on the estimates, and evaluation on the true channels.
//!
//! Users are flattened to a single index `n = l·K + k` (user `k` of cell
//! `l`), and beams likewise (`u = j·K + m`, beam of BS `j` for its user `m`).
//! The network is then solved by the same routine as a single cell, with one
//! power budget per cell.

mod estimate;
mod layout;

pub use estimate::{ls_estimate, ls_estimate_with_noise};
pub use layout::{dft_pilots, layout_and_draw, Links, MultiCellChannels, MultiCellParams};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::solver::{dinkelbach_solve, Network, SolverTrace};
use crate::sysmodel::{link_gain, mrt_all, shannon_rate, sinr_from_gains, GainMatrix};

/// Which channels the link gains are computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainSource {
    /// LS estimates, as seen by the base stations.
    Estimated,
    /// The true channels.
    True,
}

/// Whether a user's interference includes the beams other cells aim at
/// users holding the same pilot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamePilot {
    /// Interference from `(l, k)` with `k ≠ m` only.
    Excluded,
    /// Interference from every `(l, k) ≠ (j, m)`.
    Included,
}

/// MRT beams on every base station's estimates of its own users,
/// `w_{jm} = ĝ_{jjm}ᴴ / ‖ĝ_{jjm}‖`, flattened by `j·K + m`.
pub fn estimated_beams(channels: &MultiCellChannels) -> Result<Vec<Vec<Complex64>>> {
    let est = estimates(channels)?;
    mrt_all(&est.concat())
}

fn estimates(channels: &MultiCellChannels) -> Result<&Vec<Vec<Vec<Complex64>>>> {
    channels
        .estimates
        .as_ref()
        .ok_or_else(|| Error::param("channels", "no channel estimates; run ls_estimate first"))
}

/// Flattened link gains `G[l·K + k][j·K + m] = |c_{jlk} · w_{jm}|²`, with
/// `c = ĝ` or `g` per `source`. Same-pilot pairs of different cells are zero
/// when `same_pilot` is [`SamePilot::Excluded`].
pub fn gain_matrix(
    channels: &MultiCellChannels,
    beams: &[Vec<Complex64>],
    source: GainSource,
    same_pilot: SamePilot,
) -> Result<GainMatrix> {
    let k_users = channels.users;
    let n = channels.cells * k_users;
    if beams.len() != n {
        return Err(Error::param(
            "beams",
            "one beam per user of every cell required",
        ));
    }
    let est = match source {
        GainSource::Estimated => Some(estimates(channels)?),
        GainSource::True => None,
    };
    Ok(GainMatrix::from_fn(n, |user, beam| {
        let (l, k) = (user / k_users, user % k_users);
        let (j, m) = (beam / k_users, beam % k_users);
        if same_pilot == SamePilot::Excluded && k == m && l != j {
            return 0.0;
        }
        let c = match est {
            Some(e) => e[j][k].as_slice(),
            None => channels.true_channel(j, l, k),
        };
        link_gain(c, &beams[beam])
    }))
}

/// Per-user SINR and rate, flattened by `l·K + k`. Estimated gains follow
/// the designed interference set (same-pilot users of other cells
/// excluded); true gains include every other beam.
pub fn multicell_sinr_rate(
    mc: &MultiCellParams,
    channels: &MultiCellChannels,
    beams: &[Vec<Complex64>],
    source: GainSource,
    powers: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let same_pilot = match source {
        GainSource::Estimated => SamePilot::Excluded,
        GainSource::True => SamePilot::Included,
    };
    let gains = gain_matrix(channels, beams, source, same_pilot)?;
    let sinr = sinr_from_gains(&gains, powers, mc.system.noise_power());
    let gap = mc.system.snr_gap();
    let rates = sinr
        .iter()
        .map(|&s| shannon_rate(mc.system.bandwidth, gap, s))
        .collect();
    Ok((sinr, rates))
}

/// The designed problem as a [`Network`]: estimated gains, one budget per
/// cell, circuit power of all cells.
pub fn designed_network(
    mc: &MultiCellParams,
    channels: &MultiCellChannels,
    beams: &[Vec<Complex64>],
) -> Result<Network> {
    mc.validate()?;
    let gains = gain_matrix(channels, beams, GainSource::Estimated, SamePilot::Excluded)?;
    Network::new(&mc.system, gains, cell_index(channels))
}

fn cell_index(channels: &MultiCellChannels) -> Vec<usize> {
    (0..channels.cells * channels.users)
        .map(|n| n / channels.users)
        .collect()
}

#[derive(Debug, Clone)]
pub struct MultiCellAllocation {
    /// `p_{lk}`, one row per cell.
    pub powers: Vec<Vec<f64>>,
    /// `λ_{lk}`, one row per cell.
    pub lambda: Vec<Vec<f64>>,
    /// `φ_l`.
    pub phi: Vec<f64>,
    /// Dinkelbach parameter at termination.
    pub eta: f64,
    /// Network efficiency on the estimated channels.
    pub energy_efficiency: f64,
    /// Beams the allocation was designed for, flattened by `j·K + m`.
    pub beams: Vec<Vec<Complex64>>,
    pub trace: SolverTrace,
}

impl MultiCellAllocation {
    pub fn flat_powers(&self) -> Vec<f64> {
        self.powers.concat()
    }
}

/// Network-wide efficiency maximization on the estimated channels.
pub fn multicell_solve(
    mc: &MultiCellParams,
    channels: &MultiCellChannels,
) -> Result<MultiCellAllocation> {
    let beams = estimated_beams(channels)?;
    let net = designed_network(mc, channels, &beams)?;
    let sol = dinkelbach_solve(&net)?;
    let k = channels.users;
    let rows = |v: &[f64]| v.chunks(k).map(<[f64]>::to_vec).collect::<Vec<_>>();
    Ok(MultiCellAllocation {
        powers: rows(&sol.powers),
        lambda: rows(&sol.duals.lambda),
        phi: sol.duals.phi,
        eta: sol.eta,
        energy_efficiency: sol.energy_efficiency,
        beams,
        trace: sol.trace,
    })
}

/// Metrics of a designed allocation on the true channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Realized {
    pub sinr: Vec<f64>,
    pub rates: Vec<f64>,
    /// Total rate over total power, circuit power of all cells included.
    pub energy_efficiency: f64,
    /// Users whose realized rate is below the target.
    pub rate_violations: usize,
}

/// Re-evaluates `allocation` (powers and beams as designed) on the true
/// channels, with every other beam counted as interference.
pub fn evaluate_on_true(
    mc: &MultiCellParams,
    channels: &MultiCellChannels,
    allocation: &MultiCellAllocation,
) -> Result<Realized> {
    let powers = allocation.flat_powers();
    let (sinr, rates) =
        multicell_sinr_rate(mc, channels, &allocation.beams, GainSource::True, &powers)?;
    let total_rate: f64 = rates.iter().sum();
    let total_power = powers.iter().sum::<f64>() + mc.cells as f64 * mc.system.circuit_power();
    let target = mc.system.r_min * (1.0 - mc.system.solver.rate_tolerance);
    let rate_violations = rates.iter().filter(|&&r| r < target).count();
    Ok(Realized {
        sinr,
        rates,
        energy_efficiency: total_rate / total_power,
        rate_violations,
    })
}
