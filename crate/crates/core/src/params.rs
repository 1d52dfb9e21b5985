//! Physical and solver parameters.
//!
//! [`SystemParams::default`] holds the reference scenario: 10 kHz of
//! bandwidth, a 1 W transmit budget per cell, 1 W per active antenna, 20 W
//! of fixed site power, 0.1 W per user terminal and a 14 kbit/s minimum rate.

use crate::error::{Error, Result};

/// Scalar constants of one cell plus the solver knobs.
///
/// Fields are public so experiments can override them; call
/// [`SystemParams::validate`] after editing.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Transmit antennas at the base station (M).
    pub antennas: usize,
    /// Single-antenna users per cell (K).
    pub users: usize,
    /// Bandwidth B in Hz.
    pub bandwidth: f64,
    /// Thermal noise density in dBm/Hz.
    pub noise_dbm_per_hz: f64,
    /// Standard deviation of the log-normal shadowing, in dB.
    pub shadow_std_db: f64,
    /// Total transmit power budget per cell, in W.
    pub p_max: f64,
    /// Circuit power per antenna, in W.
    pub p_antenna: f64,
    /// Fixed base-station circuit power, in W.
    pub p_fixed: f64,
    /// Circuit power per user terminal, in W.
    pub p_user: f64,
    /// Minimum rate per user, in bit/s.
    pub r_min: f64,
    /// Target bit error rate, shared by all users.
    pub ber_target: f64,
    /// Cell radius in m.
    pub cell_radius: f64,
    /// Minimum user distance from the base station in m.
    pub min_distance: f64,
    pub path_loss_exponent: f64,
    pub solver: SolverSettings,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            antennas: 100,
            users: 5,
            bandwidth: 10e3,
            noise_dbm_per_hz: -174.0,
            shadow_std_db: 8.0,
            p_max: 1.0,
            p_antenna: 1.0,
            p_fixed: 20.0,
            p_user: 0.1,
            r_min: 14e3,
            ber_target: 1e-3,
            cell_radius: 500.0,
            min_distance: 50.0,
            path_loss_exponent: 3.0,
            solver: SolverSettings::default(),
        }
    }
}

impl SystemParams {
    /// Reference parameters with a different antenna and user count.
    pub fn with_dims(antennas: usize, users: usize) -> Self {
        SystemParams {
            antennas,
            users,
            ..Default::default()
        }
    }

    /// Noise power over the whole band, in W.
    pub fn noise_power(&self) -> f64 {
        dbm_to_watts(self.noise_dbm_per_hz + 10.0 * self.bandwidth.log10())
    }

    /// SNR gap between capacity and a practical scheme at the target BER.
    pub fn snr_gap(&self) -> f64 {
        snr_gap(self.ber_target)
    }

    /// Circuit power of one cell: `M·P^a + P^fix + K·P^ue`.
    pub fn circuit_power(&self) -> f64 {
        self.antennas as f64 * self.p_antenna + self.p_fixed + self.users as f64 * self.p_user
    }

    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 {
            return Err(Error::param("antennas", "must be at least 1"));
        }
        if self.users == 0 {
            return Err(Error::param("users", "must be at least 1"));
        }
        positive("bandwidth", self.bandwidth)?;
        positive("p_max", self.p_max)?;
        positive("p_antenna", self.p_antenna)?;
        positive("p_fixed", self.p_fixed)?;
        positive("p_user", self.p_user)?;
        positive("cell_radius", self.cell_radius)?;
        positive("min_distance", self.min_distance)?;
        positive("path_loss_exponent", self.path_loss_exponent)?;
        if !(self.shadow_std_db >= 0.0 && self.shadow_std_db.is_finite()) {
            return Err(Error::param(
                "shadow_std_db",
                "must be finite and non-negative",
            ));
        }
        if !(self.r_min >= 0.0 && self.r_min.is_finite()) {
            return Err(Error::param("r_min", "must be finite and non-negative"));
        }
        if self.min_distance >= self.cell_radius {
            return Err(Error::param(
                "min_distance",
                "must be smaller than the cell radius",
            ));
        }
        if !(self.ber_target > 0.0 && self.ber_target < 0.2) {
            return Err(Error::param("ber_target", "must lie in (0, 0.2)"));
        }
        let noise = self.noise_power();
        if !(noise > 0.0 && noise.is_finite()) {
            return Err(Error::param(
                "noise_dbm_per_hz",
                format!("derived noise power {noise:e} W is not positive"),
            ));
        }
        self.solver.validate()
    }
}

/// `-2 / (3 ln(5 e))` for target bit error rate `e`.
pub fn snr_gap(ber_target: f64) -> f64 {
    -2.0 / (3.0 * (5.0 * ber_target).ln())
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must be finite and positive, got {value}"),
        ))
    }
}

/// Step-size schedule for the subgradient updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    Constant,
    /// `γ / √t`.
    Diminishing,
}

/// How the total-power multiplier is driven inside the dual loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerDual {
    /// After every closed-form power update, the cell's common power scale
    /// is set by its one-dimensional KKT condition (with the budget cap),
    /// which also yields the exact multiplier.
    ScaleKkt,
    /// Plain projected subgradient on the multiplier, no scale step.
    Subgradient,
}

/// Which feasible points seed the successive convex approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Starts {
    /// Equal split of the budget with cold coefficients `a = 1, b = 0`.
    Uniform,
    /// The uniform start plus one start per user in which that user holds
    /// almost the entire budget (coefficients fitted at the start).
    /// Only used when the minimum rate is zero; otherwise such starts
    /// are outside the rate-feasible region.
    UniformAndDominant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    /// Dinkelbach stopping tolerance, relative to η.
    pub epsilon: f64,
    /// Dimensionless step for the power multiplier; the effective step is
    /// `step_phi · (B/ln 2) / P^max`.
    pub step_phi: f64,
    /// Dimensionless step for the rate multipliers; the effective step is
    /// `step_lambda / R^min`.
    pub step_lambda: f64,
    pub step_rule: StepRule,
    pub power_dual: PowerDual,
    pub starts: Starts,
    /// Initial value of every multiplier.
    pub initial_multiplier: f64,
    pub tol_power: f64,
    pub tol_sca: f64,
    pub tol_dual: f64,
    pub max_dinkelbach: usize,
    pub max_sca: usize,
    pub max_inner: usize,
    /// Lower clamp on every transmit power, in W.
    pub p_floor: f64,
    /// Lower clamp on `Γ·sinr` before fitting SCA coefficients.
    pub sinr_floor: f64,
    /// A rate multiplier above this declares the instance infeasible.
    pub lambda_limit: f64,
    /// Relative rate shortfall tolerated when the dual loop stops.
    pub rate_tolerance: f64,
    /// Consecutive refitted SCA rounds whose dual loop ends infeasible
    /// before the instance is declared infeasible.
    pub infeasible_rounds: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            epsilon: 1e-4,
            step_phi: 0.5,
            step_lambda: 0.5,
            step_rule: StepRule::Constant,
            power_dual: PowerDual::ScaleKkt,
            starts: Starts::UniformAndDominant,
            initial_multiplier: 0.1,
            tol_power: 1e-4,
            tol_sca: 1e-4,
            tol_dual: 1e-4,
            max_dinkelbach: 30,
            max_sca: 50,
            max_inner: 2000,
            p_floor: 1e-12,
            sinr_floor: 1e-10,
            lambda_limit: 1e6,
            rate_tolerance: 1e-3,
            infeasible_rounds: 5,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        positive("epsilon", self.epsilon)?;
        positive("step_phi", self.step_phi)?;
        positive("step_lambda", self.step_lambda)?;
        positive("tol_power", self.tol_power)?;
        positive("tol_sca", self.tol_sca)?;
        positive("tol_dual", self.tol_dual)?;
        positive("p_floor", self.p_floor)?;
        positive("sinr_floor", self.sinr_floor)?;
        positive("lambda_limit", self.lambda_limit)?;
        positive("rate_tolerance", self.rate_tolerance)?;
        if !(self.initial_multiplier >= 0.0 && self.initial_multiplier.is_finite()) {
            return Err(Error::param("initial_multiplier", "must be non-negative"));
        }
        for (name, cap) in [
            ("max_dinkelbach", self.max_dinkelbach),
            ("max_sca", self.max_sca),
            ("max_inner", self.max_inner),
            ("infeasible_rounds", self.infeasible_rounds),
        ] {
            if cap == 0 {
                return Err(Error::param(name, "must be at least 1"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn defaults_are_valid() {
        SystemParams::default().validate().unwrap();
    }

    #[test]
    fn noise_power_is_density_times_bandwidth() {
        let p = SystemParams::default();
        // -174 dBm/Hz + 40 dB-Hz = -134 dBm = 10^-16.4 W
        assert_relative_eq!(p.noise_power(), 10f64.powf(-16.4), max_relative = 1e-12);
    }

    #[test]
    fn gap_at_reference_ber() {
        assert_relative_eq!(snr_gap(1e-3), 0.125_826, epsilon = 1e-6);
    }

    #[test]
    fn rejects_bad_values() {
        let p = SystemParams {
            path_loss_exponent: -1.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());

        let p = SystemParams {
            min_distance: 600.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());

        let p = SystemParams {
            ber_target: 0.2,
            ..Default::default()
        };
        assert!(p.validate().is_err());

        let p = SystemParams {
            noise_dbm_per_hz: f64::NEG_INFINITY,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
