//! Channel realizations: user placement, log-normal shadowing, path loss and
//! Rayleigh fast fading.
//!
//! The random stream is always consumed in the same order: user positions,
//! then shadowing, then fast fading. The multi-cell layout follows the same
//! order, so a one-cell layout reproduces a single-cell draw exactly.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Seeded random source used throughout the crate.
pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Polar position of a user relative to its serving base station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub radius: f64,
    pub angle: f64,
}

/// Large-scale gain and distance for every user of a cell.
#[derive(Debug, Clone, PartialEq)]
pub struct LargeScale {
    pub beta: Vec<f64>,
    pub distance: Vec<f64>,
}

/// `β = ψ·(d0/d)^v` with `ψ = 10^(shadow_db/10)`.
pub fn path_gain(params: &SystemParams, distance: f64, shadow_db: f64) -> f64 {
    10f64.powf(shadow_db / 10.0) * (params.min_distance / distance).powf(params.path_loss_exponent)
}

/// Uniform over the area of the annulus `min_distance ≤ d ≤ cell_radius`.
pub fn draw_placement<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> Placement {
    let d0 = params.min_distance;
    let r = params.cell_radius;
    let u: f64 = rng.random();
    let radius = (d0 * d0 + u * (r * r - d0 * d0)).sqrt();
    let angle = 2.0 * PI * rng.random::<f64>();
    Placement { radius, angle }
}

/// Shadowing in dB, `N(0, σ_sh²)`.
pub fn draw_shadow_db<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    params.shadow_std_db * z
}

/// Circularly-symmetric complex Gaussian with unit variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

pub fn complex_gaussian_vec<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<Complex64> {
    (0..len).map(|_| complex_gaussian(rng)).collect()
}

/// Per-user `(β_i, d_i)` for one cell.
pub fn draw_large_scale<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> LargeScale {
    let placements: Vec<Placement> = (0..params.users)
        .map(|_| draw_placement(params, rng))
        .collect();
    let distance: Vec<f64> = placements.iter().map(|p| p.radius).collect();
    let beta = distance
        .iter()
        .map(|&d| path_gain(params, d, draw_shadow_db(params, rng)))
        .collect();
    LargeScale { beta, distance }
}

/// One `CN(0, I_M)` vector per user.
pub fn draw_fast_fading<R: Rng + ?Sized>(
    params: &SystemParams,
    rng: &mut R,
) -> Vec<Vec<Complex64>> {
    (0..params.users)
        .map(|_| complex_gaussian_vec(params.antennas, rng))
        .collect()
}

pub fn draw_channels<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> ChannelSet {
    let large = draw_large_scale(params, rng);
    let h = draw_fast_fading(params, rng);
    ChannelSet::new(large.beta, large.distance, h).expect("draws have consistent dimensions")
}

/// Channels of the K users of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    beta: Vec<f64>,
    distance: Vec<f64>,
    h: Vec<Vec<Complex64>>,
    g: Vec<Vec<Complex64>>,
}

impl ChannelSet {
    /// Builds `g_i = √β_i · h_i`.
    pub fn new(beta: Vec<f64>, distance: Vec<f64>, h: Vec<Vec<Complex64>>) -> Result<Self> {
        if beta.len() != h.len() || distance.len() != h.len() {
            return Err(Error::param(
                "channels",
                "beta, distance and h lengths differ",
            ));
        }
        if h.is_empty() {
            return Err(Error::param("channels", "no users"));
        }
        let m = h[0].len();
        if m == 0 || h.iter().any(|v| v.len() != m) {
            return Err(Error::param(
                "channels",
                "fading vectors must share a non-zero length",
            ));
        }
        if let Some(i) = beta.iter().position(|&b| !(b > 0.0 && b.is_finite())) {
            return Err(Error::param(
                "beta",
                format!("user {i} has non-positive gain"),
            ));
        }
        let g = beta
            .iter()
            .zip(&h)
            .map(|(&b, hi)| {
                let s = b.sqrt();
                hi.iter().map(|&x| x * s).collect()
            })
            .collect();
        Ok(ChannelSet {
            beta,
            distance,
            h,
            g,
        })
    }

    /// Wraps hand-built composite channels (`β = 1`, `h = g`, unknown distance).
    pub fn from_composite(g: Vec<Vec<Complex64>>) -> Result<Self> {
        let k = g.len();
        ChannelSet::new(vec![1.0; k], vec![f64::NAN; k], g)
    }

    pub fn users(&self) -> usize {
        self.g.len()
    }

    pub fn antennas(&self) -> usize {
        self.g[0].len()
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn distance(&self) -> &[f64] {
        &self.distance
    }

    pub fn fast_fading(&self) -> &[Vec<Complex64>] {
        &self.h
    }

    /// Composite channels `g_i`.
    pub fn composite(&self) -> &[Vec<Complex64>] {
        &self.g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_gain_at_reference_distance() {
        let p = SystemParams::default();
        assert_eq!(path_gain(&p, 50.0, 0.0), 1.0);
        assert_relative_eq!(path_gain(&p, 500.0, 0.0), 1e-3, max_relative = 1e-12);
    }

    #[test]
    fn shadowing_statistics() {
        let p = SystemParams::default();
        let mut rng = seeded_rng(7);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| draw_shadow_db(&p, &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.1, "mean {mean}");
        assert!((var.sqrt() - 8.0).abs() < 0.16, "std {}", var.sqrt());
    }

    #[test]
    fn placements_cover_annulus_uniformly_in_area() {
        let p = SystemParams::default();
        let mut rng = seeded_rng(3);
        let n = 100_000;
        let radii: Vec<f64> = (0..n)
            .map(|_| draw_placement(&p, &mut rng).radius)
            .collect();
        assert!(radii.iter().all(|&r| (50.0..=500.0).contains(&r)));
        // P(d ≤ r) = (r² − d0²)/(R² − d0²); at r = 300 that is 0.3535...
        let frac = radii.iter().filter(|&&r| r <= 300.0).count() as f64 / n as f64;
        let expected = (300f64.powi(2) - 50f64.powi(2)) / (500f64.powi(2) - 50f64.powi(2));
        assert!((frac - expected).abs() < 0.005, "{frac} vs {expected}");
    }

    #[test]
    fn fast_fading_energy_matches_antenna_count() {
        let p = SystemParams::with_dims(100, 1);
        let mut rng = seeded_rng(11);
        let n = 10_000;
        let energies: Vec<f64> = (0..n)
            .map(|_| {
                draw_fast_fading(&p, &mut rng)[0]
                    .iter()
                    .map(|x| x.norm_sqr())
                    .sum()
            })
            .collect();
        let mean = energies.iter().sum::<f64>() / n as f64;
        // ‖h‖² is Gamma(M, 1): std of the sample mean is √M/√n.
        let sigma = (100.0f64).sqrt() / (n as f64).sqrt();
        assert!((mean - 100.0).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn fast_fading_is_zero_mean_with_split_variance() {
        let p = SystemParams::with_dims(50, 4);
        let mut rng = seeded_rng(5);
        let mut sum = Complex64::new(0.0, 0.0);
        let (mut re2, mut im2) = (0.0, 0.0);
        let mut n = 0.0;
        for _ in 0..500 {
            for x in draw_fast_fading(&p, &mut rng).into_iter().flatten() {
                sum += x;
                re2 += x.re * x.re;
                im2 += x.im * x.im;
                n += 1.0;
            }
        }
        assert!((sum / n).norm() < 0.01);
        assert!((re2 / n - 0.5).abs() < 0.01);
        assert!((im2 / n - 0.5).abs() < 0.01);
    }

    #[test]
    fn same_seed_same_channels() {
        let p = SystemParams::default();
        let a = draw_channels(&p, &mut seeded_rng(42));
        let b = draw_channels(&p, &mut seeded_rng(42));
        assert_eq!(a, b);
        let c = draw_channels(&p, &mut seeded_rng(43));
        assert_ne!(a, c);
    }

    #[test]
    fn composite_is_scaled_fast_fading() {
        let p = SystemParams::with_dims(16, 3);
        let ch = draw_channels(&p, &mut seeded_rng(1));
        assert_eq!(ch.users(), 3);
        assert_eq!(ch.antennas(), 16);
        for i in 0..3 {
            let s = ch.beta()[i].sqrt();
            for (g, h) in ch.composite()[i].iter().zip(&ch.fast_fading()[i]) {
                assert!((g - h * s).norm() <= 1e-12 * g.norm().max(f64::MIN_POSITIVE));
            }
        }
    }

    #[test]
    fn rejects_ragged_channels() {
        let g = vec![
            vec![Complex64::new(1.0, 0.0); 3],
            vec![Complex64::new(1.0, 0.0); 2],
        ];
        assert!(ChannelSet::from_composite(g).is_err());
    }
}
