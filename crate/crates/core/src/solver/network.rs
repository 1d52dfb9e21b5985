use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::params::{SolverSettings, SystemParams};
use crate::sysmodel::{shannon_rate, sinr_from_gains, Beamformers, ChannelSet, GainMatrix};

use super::sca::ScaCoefficients;

/// Everything the power-allocation solver needs about one problem instance:
/// the link gains `|g_k · w_u|²` under the fixed beams, the cell each user
/// belongs to, and the scalar constants.
///
/// A single cell is a network with one cell. The multi-cell problem uses the
/// same type with one power budget per cell and the summed circuit power.
#[derive(Debug, Clone)]
pub struct Network {
    gains: GainMatrix,
    cell_of: Vec<usize>,
    members: Vec<Vec<usize>>,
    noise: f64,
    bandwidth: f64,
    gap: f64,
    p_max: f64,
    r_min: f64,
    circuit_power: f64,
    settings: SolverSettings,
}

impl Network {
    pub fn single_cell(
        params: &SystemParams,
        channels: &ChannelSet,
        beams: &Beamformers,
    ) -> Result<Self> {
        if channels.users() != beams.len() {
            return Err(Error::param("beams", "one beam per user required"));
        }
        let gains = GainMatrix::from_channels(channels, beams);
        let k = gains.size();
        let params = SystemParams {
            users: k,
            antennas: channels.antennas(),
            ..params.clone()
        };
        Network::new(&params, gains, vec![0; k])
    }

    /// `cell_of[n]` is the cell of user `n`; the circuit power is that of
    /// one `params` cell times the number of cells.
    pub fn new(params: &SystemParams, gains: GainMatrix, cell_of: Vec<usize>) -> Result<Self> {
        params.validate()?;
        if cell_of.len() != gains.size() {
            return Err(Error::param("cell_of", "one entry per user required"));
        }
        let cells = cell_of.iter().max().map_or(0, |&c| c + 1);
        let mut members = vec![Vec::new(); cells];
        for (n, &c) in cell_of.iter().enumerate() {
            members[c].push(n);
        }
        if members.iter().any(Vec::is_empty) {
            return Err(Error::param(
                "cell_of",
                "every cell needs at least one user",
            ));
        }
        Ok(Network {
            gains,
            cell_of,
            members,
            noise: params.noise_power(),
            bandwidth: params.bandwidth,
            gap: params.snr_gap(),
            p_max: params.p_max,
            r_min: params.r_min,
            circuit_power: cells as f64 * params.circuit_power(),
            settings: params.solver.clone(),
        })
    }

    pub fn users(&self) -> usize {
        self.gains.size()
    }

    pub fn cells(&self) -> usize {
        self.members.len()
    }

    pub fn cell_of(&self, user: usize) -> usize {
        self.cell_of[user]
    }

    pub fn members(&self, cell: usize) -> &[usize] {
        &self.members[cell]
    }

    pub fn gains(&self) -> &GainMatrix {
        &self.gains
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn circuit_power(&self) -> f64 {
        self.circuit_power
    }

    pub fn settings(&self) -> &SolverSettings {
        &self.settings
    }

    pub fn settings_mut(&mut self) -> &mut SolverSettings {
        &mut self.settings
    }

    /// `B / ln 2`, the derivative scale of `B·log2(·)`.
    pub fn rate_scale(&self) -> f64 {
        self.bandwidth / LN_2
    }

    pub fn sinr(&self, powers: &[f64]) -> Vec<f64> {
        sinr_from_gains(&self.gains, powers, self.noise)
    }

    pub fn rates(&self, powers: &[f64]) -> Vec<f64> {
        self.sinr(powers)
            .into_iter()
            .map(|s| shannon_rate(self.bandwidth, self.gap, s))
            .collect()
    }

    /// `B·(a·log2(Γ·sinr) + b)` per user.
    pub fn surrogate_rates(&self, powers: &[f64], sca: &ScaCoefficients) -> Vec<f64> {
        self.sinr(powers)
            .into_iter()
            .enumerate()
            .map(|(i, s)| self.bandwidth * sca.surrogate(i, self.gap * s))
            .collect()
    }

    pub fn total_power(&self, powers: &[f64]) -> f64 {
        powers.iter().sum::<f64>() + self.circuit_power
    }

    pub fn energy_efficiency(&self, powers: &[f64]) -> f64 {
        self.rates(powers).iter().sum::<f64>() / self.total_power(powers)
    }

    /// Transmit power drawn by each cell.
    pub fn cell_powers(&self, powers: &[f64]) -> Vec<f64> {
        self.members
            .iter()
            .map(|m| m.iter().map(|&n| powers[n]).sum())
            .collect()
    }

    /// Every cell's budget split evenly across its users.
    pub fn uniform_start(&self) -> Vec<f64> {
        (0..self.users())
            .map(|n| self.p_max / self.members[self.cell_of[n]].len() as f64)
            .collect()
    }
}
