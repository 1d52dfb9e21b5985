//! Brute-force baselines for checking the solver.
//!
//! Nothing here calls into [`crate::solver`]: link gains, rates, power
//! consumption and efficiency are recomputed from the raw channel and beam
//! vectors with plain loops.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::sysmodel::{Beamformers, ChannelSet};

/// Largest number of users the exhaustive search accepts.
pub const MAX_USERS: usize = 3;
/// Largest number of grid points the exhaustive search accepts.
pub const MAX_POINTS: f64 = 1e7;

/// Log-spaced power grid on `[lo, hi]`, shared by every user.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    points: usize,
    lo: f64,
    hi: f64,
    refinements: u32,
}

impl GridSpec {
    pub fn new(points: usize, lo: f64, hi: f64) -> Result<Self> {
        if points < 16 {
            return Err(Error::Grid(format!(
                "{points} points per dimension, at least 16 required"
            )));
        }
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Grid(format!("invalid range [{lo}, {hi}]")));
        }
        Ok(GridSpec {
            points,
            lo,
            hi,
            refinements: 0,
        })
    }

    /// `[p_floor, P^max]` of `params`.
    pub fn for_params(params: &SystemParams, points: usize) -> Result<Self> {
        GridSpec::new(points, params.solver.p_floor, params.p_max)
    }

    /// Inserts the geometric midpoint between neighbours: `2n − 1` points,
    /// containing every point of `self` exactly.
    pub fn refined(&self) -> Self {
        GridSpec {
            refinements: self.refinements + 1,
            ..self.clone()
        }
    }

    pub fn len(&self) -> usize {
        let mut n = self.points;
        for _ in 0..self.refinements {
            n = 2 * n - 1;
        }
        n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let step = (self.hi / self.lo).ln() / (n - 1) as f64;
        let mut v: Vec<f64> = (0..n).map(|i| self.lo * (i as f64 * step).exp()).collect();
        v[n - 1] = self.hi;
        for _ in 0..self.refinements {
            let mut finer = Vec::with_capacity(2 * v.len() - 1);
            for w in v.windows(2) {
                finer.push(w[0]);
                finer.push((w[0] * w[1]).sqrt());
            }
            finer.push(v[v.len() - 1]);
            v = finer;
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridOptimum {
    pub powers: Vec<f64>,
    pub energy_efficiency: f64,
    pub feasible_points: usize,
}

/// Evaluates the efficiency at every grid point with `Σp ≤ P^max` and every
/// rate at least `r_min`, and returns the best.
pub fn grid_search_ee(
    params: &SystemParams,
    channels: &ChannelSet,
    beams: &Beamformers,
    grid: &GridSpec,
    r_min: f64,
) -> Result<GridOptimum> {
    let k = channels.users();
    if k == 0 || k > MAX_USERS {
        return Err(Error::Grid(format!(
            "{k} users, at most {MAX_USERS} supported"
        )));
    }
    if beams.len() != k {
        return Err(Error::Grid("one beam per user required".into()));
    }
    let values = grid.values();
    if (values.len() as f64).powi(k as i32) > MAX_POINTS {
        return Err(Error::Grid(format!(
            "{}^{k} points exceeds the limit",
            values.len()
        )));
    }

    let model = Model::new(params, channels, beams);
    let budget = params.p_max * (1.0 + 1e-9);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut feasible = 0;
    let mut index = vec![0usize; k];
    let mut p = vec![0.0; k];
    loop {
        for (pi, &ix) in p.iter_mut().zip(&index) {
            *pi = values[ix];
        }
        if p.iter().sum::<f64>() <= budget {
            if let Some(ee) = model.efficiency(&p, r_min) {
                feasible += 1;
                if best.as_ref().is_none_or(|(b, _)| ee > *b) {
                    best = Some((ee, p.clone()));
                }
            }
        }
        // Odometer increment over the k indices.
        let mut d = 0;
        loop {
            if d == k {
                return best
                    .map(|(energy_efficiency, powers)| GridOptimum {
                        powers,
                        energy_efficiency,
                        feasible_points: feasible,
                    })
                    .ok_or(Error::GridInfeasible);
            }
            index[d] += 1;
            if index[d] < values.len() {
                break;
            }
            index[d] = 0;
            d += 1;
        }
    }
}

/// Efficiency model rebuilt from the raw vectors.
struct Model {
    gain: Vec<Vec<f64>>,
    noise: f64,
    bandwidth: f64,
    gap: f64,
    circuit: f64,
}

impl Model {
    fn new(params: &SystemParams, channels: &ChannelSet, beams: &Beamformers) -> Self {
        let g = channels.composite();
        let w = beams.vectors();
        let gain = g
            .iter()
            .map(|gi| {
                w.iter()
                    .map(|wu| {
                        let (mut re, mut im) = (0.0, 0.0);
                        for (a, b) in gi.iter().zip(wu) {
                            re += a.re * b.re - a.im * b.im;
                            im += a.re * b.im + a.im * b.re;
                        }
                        re * re + im * im
                    })
                    .collect()
            })
            .collect();
        let noise_dbm = params.noise_dbm_per_hz + 10.0 * params.bandwidth.log10();
        Model {
            gain,
            noise: 10f64.powf((noise_dbm - 30.0) / 10.0),
            bandwidth: params.bandwidth,
            gap: -2.0 / (3.0 * (5.0 * params.ber_target).ln()),
            circuit: params.antennas as f64 * params.p_antenna
                + params.p_fixed
                + channels.users() as f64 * params.p_user,
        }
    }

    /// `None` when some rate is below `r_min`.
    fn efficiency(&self, p: &[f64], r_min: f64) -> Option<f64> {
        let mut total_rate = 0.0;
        for (i, row) in self.gain.iter().enumerate() {
            let interference: f64 = row
                .iter()
                .zip(p)
                .enumerate()
                .filter(|&(u, _)| u != i)
                .map(|(_, (g, q))| g * q)
                .sum();
            let sinr = p[i] * row[i] / (interference + self.noise);
            let rate = self.bandwidth * (1.0 + self.gap * sinr).ln() / LN_2;
            if rate < r_min {
                return None;
            }
            total_rate += rate;
        }
        Some(total_rate / (p.iter().sum::<f64>() + self.circuit))
    }
}

/// Number of `(user, s)` pairs with `a·log2(s) + b > log2(1 + s) + 1e-12`.
pub fn sca_bound_check(samples: &[f64], a: &[f64], b: &[f64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(&ai, &bi)| {
            samples
                .iter()
                .filter(|&&s| ai * s.log2() + bi > (1.0 + s).log2() + 1e-12)
                .count()
        })
        .sum()
}

/// `n` log-spaced samples on `[lo, hi]`.
pub fn log_samples(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi / lo).ln() / (n.max(2) - 1) as f64;
    (0..n).map(|i| lo * (i as f64 * step).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysmodel::{draw_channels, mrt_beamformers, seeded_rng};
    use approx::assert_relative_eq;

    fn instance(
        antennas: usize,
        users: usize,
        seed: u64,
    ) -> (SystemParams, ChannelSet, Beamformers) {
        let params = SystemParams {
            r_min: 0.0,
            ..SystemParams::with_dims(antennas, users)
        };
        let ch = draw_channels(&params, &mut seeded_rng(seed));
        let beams = mrt_beamformers(&ch).unwrap();
        (params, ch, beams)
    }

    #[test]
    fn grid_is_log_spaced_and_refinement_is_a_superset() {
        let g = GridSpec::new(16, 1e-6, 1.0).unwrap();
        let v = g.values();
        assert_eq!(v.len(), 16);
        assert_eq!(v[0], 1e-6);
        assert_eq!(v[15], 1.0);
        for w in v.windows(3) {
            assert_relative_eq!(w[1] / w[0], w[2] / w[1], max_relative = 1e-12);
        }
        let r = g.refined();
        let fine = r.values();
        assert_eq!(fine.len(), 31);
        assert_eq!(r.len(), 31);
        for (i, x) in v.iter().enumerate() {
            assert_eq!(fine[2 * i], *x);
        }
    }

    #[test]
    fn grid_rejects_bad_specs() {
        assert!(GridSpec::new(15, 1e-6, 1.0).is_err());
        assert!(GridSpec::new(16, 0.0, 1.0).is_err());
        assert!(GridSpec::new(16, 1.0, 1.0).is_err());
        let (params, ch, beams) = instance(4, 3, 0);
        let big = GridSpec::new(1000, 1e-12, 1.0).unwrap();
        assert!(matches!(
            grid_search_ee(&params, &ch, &beams, &big, 0.0),
            Err(Error::Grid(_))
        ));
        let (params, ch, beams) = instance(4, 4, 0);
        let small = GridSpec::new(16, 1e-12, 1.0).unwrap();
        assert!(grid_search_ee(&params, &ch, &beams, &small, 0.0).is_err());
    }

    #[test]
    fn single_user_matches_a_direct_scan() {
        let (params, ch, beams) = instance(8, 1, 3);
        let grid = GridSpec::for_params(&params, 2000).unwrap();
        let best = grid_search_ee(&params, &ch, &beams, &grid, 0.0).unwrap();
        let gain = ch.composite()[0].iter().map(|x| x.norm_sqr()).sum::<f64>();
        let scan = grid
            .values()
            .into_iter()
            .map(|p| {
                let rate = params.bandwidth
                    * (1.0 + params.snr_gap() * p * gain / params.noise_power()).log2();
                rate / (p + params.circuit_power())
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert_relative_eq!(best.energy_efficiency, scan, max_relative = 1e-12);
        assert_eq!(best.feasible_points, 2000);
    }

    #[test]
    fn refining_never_lowers_the_optimum() {
        for seed in 0..5 {
            let (params, ch, beams) = instance(4, 2, seed);
            let grid = GridSpec::for_params(&params, 40).unwrap();
            let coarse = grid_search_ee(&params, &ch, &beams, &grid, 0.0).unwrap();
            let fine = grid_search_ee(&params, &ch, &beams, &grid.refined(), 0.0).unwrap();
            assert!(fine.energy_efficiency >= coarse.energy_efficiency);
        }
    }

    #[test]
    fn deterministic() {
        let (params, ch, beams) = instance(4, 2, 8);
        let grid = GridSpec::for_params(&params, 64).unwrap();
        assert_eq!(
            grid_search_ee(&params, &ch, &beams, &grid, 0.0).unwrap(),
            grid_search_ee(&params, &ch, &beams, &grid, 0.0).unwrap()
        );
    }

    #[test]
    fn unreachable_rate_is_reported() {
        let (params, ch, beams) = instance(2, 2, 1);
        let grid = GridSpec::for_params(&params, 32).unwrap();
        assert!(matches!(
            grid_search_ee(&params, &ch, &beams, &grid, 1e9),
            Err(Error::GridInfeasible)
        ));
    }

    #[test]
    fn rate_constraint_is_respected() {
        let (mut params, ch, beams) = instance(16, 2, 4);
        params.r_min = 5e3;
        let grid = GridSpec::for_params(&params, 200).unwrap();
        let best = grid_search_ee(&params, &ch, &beams, &grid, params.r_min).unwrap();
        let free = grid_search_ee(&params, &ch, &beams, &grid, 0.0).unwrap();
        assert!(best.energy_efficiency <= free.energy_efficiency);
        assert!(best.feasible_points < free.feasible_points);
    }

    fn tangent(s0: f64) -> (f64, f64) {
        let a = s0 / (1.0 + s0);
        (a, (1.0 + s0).log2() - a * s0.log2())
    }

    #[test]
    fn fitted_bound_has_no_violations() {
        let samples = log_samples(1e-6, 1e6, 1000);
        let (a, b) = tangent(1.0);
        assert_eq!(sca_bound_check(&samples, &[a], &[b]), 0);
        for s0 in log_samples(1e-8, 1e8, 50) {
            let (a, b) = tangent(s0);
            assert_eq!(sca_bound_check(&samples, &[a], &[b]), 0);
            assert!(
                (a * s0.log2() + b - (1.0 + s0).log2()).abs() <= 1e-12 * (1.0 + s0).log2().max(1.0)
            );
        }
    }

    #[test]
    fn cold_start_bound_is_valid() {
        // log2(s) < log2(1 + s) for every s > 0.
        let samples = log_samples(1e-12, 1e12, 10_000);
        assert_eq!(sca_bound_check(&samples, &[1.0], &[0.0]), 0);
    }

    #[test]
    fn loose_coefficients_are_caught() {
        let samples = log_samples(1e-3, 1e3, 100);
        assert!(sca_bound_check(&samples, &[1.0], &[0.5]) > 0);
    }
}
