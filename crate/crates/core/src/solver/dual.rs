//! Lagrange multipliers and their projected subgradient updates.

use super::network::Network;

#[derive(Debug, Clone, PartialEq)]
pub struct DualMultipliers {
    /// One total-power multiplier per cell.
    pub phi: Vec<f64>,
    /// One minimum-rate multiplier per user.
    pub lambda: Vec<f64>,
    /// Step for `phi`, in multiplier units per W.
    pub gamma_phi: f64,
    /// Step for `lambda`, per bit/s.
    pub gamma_lambda: f64,
}

impl DualMultipliers {
    /// Starting multipliers and effective step sizes for `net`.
    ///
    /// With `R^min = 0` the rate multipliers start (and stay) at zero.
    pub fn initial(net: &Network) -> Self {
        let s = net.settings();
        let lambda0 = if net.r_min() > 0.0 {
            s.initial_multiplier
        } else {
            0.0
        };
        let rate_unit = if net.r_min() > 0.0 {
            net.r_min()
        } else {
            net.bandwidth()
        };
        DualMultipliers {
            phi: vec![s.initial_multiplier; net.cells()],
            lambda: vec![lambda0; net.users()],
            gamma_phi: s.step_phi * net.rate_scale() / net.p_max(),
            gamma_lambda: s.step_lambda / rate_unit,
        }
    }

    /// Largest change between two multiplier sets, relative for values above one.
    pub fn distance(&self, other: &DualMultipliers) -> f64 {
        self.phi
            .iter()
            .zip(&other.phi)
            .chain(self.lambda.iter().zip(&other.lambda))
            .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1.0))
            .fold(0.0, f64::max)
    }
}

/// `φ ← [φ + γ_φ(Σp − P^max)]⁺` per cell and `λ_k ← [λ_k + γ_λ(R^min − r_k)]⁺`.
///
/// `step_scale` multiplies both steps (1 for a constant rule). With
/// `R^min = 0` the rate constraints are vacuous for the true rates and the
/// rate multipliers stay at zero.
pub fn subgradient_step(
    duals: &DualMultipliers,
    net: &Network,
    powers: &[f64],
    rates: &[f64],
    step_scale: f64,
) -> DualMultipliers {
    let phi = net
        .cell_powers(powers)
        .iter()
        .zip(&duals.phi)
        .map(|(&total, &phi)| (phi + step_scale * duals.gamma_phi * (total - net.p_max())).max(0.0))
        .collect();
    if net.r_min() <= 0.0 {
        return DualMultipliers {
            phi,
            lambda: vec![0.0; duals.lambda.len()],
            ..duals.clone()
        };
    }
    let lambda = duals
        .lambda
        .iter()
        .zip(rates)
        .map(|(&l, &r)| (l + step_scale * duals.gamma_lambda * (net.r_min() - r)).max(0.0))
        .collect();
    DualMultipliers {
        phi,
        lambda,
        ..duals.clone()
    }
}
