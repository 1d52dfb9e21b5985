//! SINR, rate, power consumption and energy efficiency.

use std::f64::consts::LN_2;
use std::ops::Deref;

use super::beam::{Beamformers, GainMatrix};
use super::channel::ChannelSet;
use crate::params::SystemParams;

/// Per-user transmit powers in W.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation(Vec<f64>);

impl PowerAllocation {
    pub fn new(p: Vec<f64>) -> Self {
        PowerAllocation(p)
    }

    pub fn uniform(users: usize, total: f64) -> Self {
        PowerAllocation(vec![total / users as f64; users])
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Non-negative and within `p_max + tol` in total.
    pub fn is_feasible(&self, p_max: f64, tol: f64) -> bool {
        self.0.iter().all(|&p| p >= 0.0) && self.total() <= p_max + tol
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for PowerAllocation {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for PowerAllocation {
    fn from(p: Vec<f64>) -> Self {
        PowerAllocation(p)
    }
}

/// `sinr_i = p_i G_ii / (Σ_{k≠i} p_k G_ik + σ²)` on a gain matrix.
pub fn sinr_from_gains(gains: &GainMatrix, powers: &[f64], noise: f64) -> Vec<f64> {
    (0..gains.size())
        .map(|i| {
            let row = gains.row(i);
            let interference: f64 = row
                .iter()
                .zip(powers)
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, (g, p))| g * p)
                .sum();
            powers[i] * row[i] / (interference + noise)
        })
        .collect()
}

pub fn sinr(
    params: &SystemParams,
    channels: &ChannelSet,
    beams: &Beamformers,
    powers: &[f64],
) -> Vec<f64> {
    let gains = GainMatrix::from_channels(channels, beams);
    sinr_from_gains(&gains, powers, params.noise_power())
}

/// `B·log2(1 + Γ·sinr)`.
#[inline]
pub fn shannon_rate(bandwidth: f64, gap: f64, sinr: f64) -> f64 {
    bandwidth * (gap * sinr).ln_1p() / LN_2
}

pub fn rate(params: &SystemParams, sinr: &[f64]) -> Vec<f64> {
    let gap = params.snr_gap();
    sinr.iter()
        .map(|&s| shannon_rate(params.bandwidth, gap, s))
        .collect()
}

/// `Σp + M·P^a + P^fix + K·P^ue`.
pub fn power_consumption(params: &SystemParams, powers: &[f64]) -> f64 {
    powers.iter().sum::<f64>() + params.circuit_power()
}

/// Total rate over total consumed power, in bit/J.
pub fn energy_efficiency(
    params: &SystemParams,
    channels: &ChannelSet,
    beams: &Beamformers,
    powers: &[f64],
) -> f64 {
    let rates = rate(params, &sinr(params, channels, beams, powers));
    rates.iter().sum::<f64>() / power_consumption(params, powers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysmodel::{draw_channels, mrt_beamformers, seeded_rng};
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_user_without_interference() {
        let ch = ChannelSet::from_composite(vec![vec![c(1.0, 0.0)]]).unwrap();
        let w = crate::sysmodel::mrt_beamformers(&ch).unwrap();
        let g = GainMatrix::from_channels(&ch, &w);
        assert_eq!(sinr_from_gains(&g, &[1.0], 1.0), vec![1.0]);
    }

    #[test]
    fn zero_power_zero_sinr() {
        let p = SystemParams::with_dims(8, 3);
        let ch = draw_channels(&p, &mut seeded_rng(1));
        let w = mrt_beamformers(&ch).unwrap();
        assert_eq!(sinr(&p, &ch, &w, &[0.0; 3]), vec![0.0; 3]);
        assert_eq!(energy_efficiency(&p, &ch, &w, &[0.0; 3]), 0.0);
    }

    #[test]
    fn orthogonal_users_do_not_interfere() {
        let ch = ChannelSet::from_composite(vec![
            vec![c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, -3.0)],
        ])
        .unwrap();
        let w = mrt_beamformers(&ch).unwrap();
        let g = GainMatrix::from_channels(&ch, &w);
        assert_eq!(g.get(0, 1), 0.0);
        assert_eq!(g.get(1, 0), 0.0);
        let s = sinr_from_gains(&g, &[0.5, 0.25], 0.1);
        assert_relative_eq!(s[0], 0.5 * 4.0 / 0.1, max_relative = 1e-14);
        assert_relative_eq!(s[1], 0.25 * 9.0 / 0.1, max_relative = 1e-14);
    }

    #[test]
    fn rate_reference_values() {
        let p = SystemParams::default();
        assert_eq!(rate(&p, &[0.0]), vec![0.0]);
        // 10^4 · log2(1 + Γ) with Γ = -2/(3 ln 0.005)
        let gap = -2.0 / (3.0 * 0.005f64.ln());
        let expected = 1e4 * (1.0 + gap).log2();
        assert_relative_eq!(rate(&p, &[1.0])[0], expected, max_relative = 1e-12);
        assert_relative_eq!(rate(&p, &[1.0])[0], 1709.9, epsilon = 0.1);
    }

    #[test]
    fn consumption_reference_values() {
        let p = SystemParams::default();
        assert_relative_eq!(
            power_consumption(&p, &[0.2; 5]),
            121.5,
            max_relative = 1e-12
        );
        let bare = SystemParams {
            antennas: 0,
            users: 0,
            ..SystemParams::default()
        };
        assert_eq!(power_consumption(&bare, &[]), 20.0);
    }

    #[test]
    fn single_user_efficiency() {
        let params = SystemParams::with_dims(1, 1);
        // composite gain and noise chosen so that sinr = 1 at p = 1
        let noise = params.noise_power();
        let ch = ChannelSet::from_composite(vec![vec![c(noise.sqrt(), 0.0)]]).unwrap();
        let w = mrt_beamformers(&ch).unwrap();
        let eta = energy_efficiency(&params, &ch, &w, &[1.0]);
        assert_relative_eq!(eta, 1709.9 / 22.1, epsilon = 0.01);
        assert_relative_eq!(eta, 77.37, epsilon = 0.01);
    }

    proptest! {
        #[test]
        fn sinr_monotone_in_powers(seed in any::<u64>(), i in 0usize..4, k in 0usize..4, bump in 1.01f64..10.0) {
            let params = SystemParams::with_dims(6, 4);
            let mut rng = seeded_rng(seed);
            let ch = draw_channels(&params, &mut rng);
            let w = mrt_beamformers(&ch).unwrap();
            let p: Vec<f64> = (0..4).map(|j| 0.05 + 0.05 * j as f64).collect();
            let base = sinr(&params, &ch, &w, &p);
            let mut q = p.clone();
            q[k] *= bump;
            let moved = sinr(&params, &ch, &w, &q);
            if i == k {
                prop_assert!(moved[i] >= base[i]);
            } else {
                prop_assert!(moved[i] <= base[i]);
            }
        }

        #[test]
        fn rate_is_concave_in_sinr(s1 in 0.0f64..1e6, s2 in 0.0f64..1e6) {
            let p = SystemParams::default();
            let r = rate(&p, &[s1, s2, 0.5 * (s1 + s2)]);
            prop_assert!(r[2] >= 0.5 * (r[0] + r[1]) - 1e-9 * r[2].abs());
        }

        #[test]
        fn efficiency_doubles_with_rate(seed in any::<u64>()) {
            let params = SystemParams::with_dims(4, 2);
            let ch = draw_channels(&params, &mut seeded_rng(seed));
            let w = mrt_beamformers(&ch).unwrap();
            let p = [0.3, 0.4];
            let eta = energy_efficiency(&params, &ch, &w, &p);
            let doubled = SystemParams { bandwidth: 2.0 * params.bandwidth, noise_dbm_per_hz: params.noise_dbm_per_hz - 10.0 * 2f64.log10(), ..params.clone() };
            let eta2 = energy_efficiency(&doubled, &ch, &w, &p);
            prop_assert!((eta2 - 2.0 * eta).abs() <= 1e-9 * eta);
        }
    }
}
