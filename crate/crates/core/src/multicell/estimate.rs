use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::sysmodel::complex_gaussian;

use super::layout::{MultiCellChannels, MultiCellParams};

/// Least-squares estimates from one reuse-1 pilot phase, with the receiver
/// noise power of `mc.system`.
pub fn ls_estimate<R: Rng + ?Sized>(
    channels: &MultiCellChannels,
    mc: &MultiCellParams,
    rng: &mut R,
) -> Result<MultiCellChannels> {
    ls_estimate_with_noise(channels, mc.pilot_power, mc.system.noise_power(), rng)
}

/// [`ls_estimate`] with an explicit noise power (W), which may be zero.
///
/// Every base station `j` receives
/// `Y_j = Σ_l √p_u · G_{jl} · Φ + Z_j` (`M × τ`, `Z_j` i.i.d. `CN(0, σ²)`)
/// and correlates with each pilot: `ĝ_{jk} = Y_j · φ_kᴴ / √p_u`. Since all
/// cells reuse `Φ`, the estimate is `Σ_l g_{jlk}` plus filtered noise.
pub fn ls_estimate_with_noise<R: Rng + ?Sized>(
    channels: &MultiCellChannels,
    pilot_power: f64,
    noise_power: f64,
    rng: &mut R,
) -> Result<MultiCellChannels> {
    if !(pilot_power > 0.0 && pilot_power.is_finite()) {
        return Err(Error::param("pilot_power", "must be positive and finite"));
    }
    if !(noise_power >= 0.0 && noise_power.is_finite()) {
        return Err(Error::param(
            "noise_power",
            "must be non-negative and finite",
        ));
    }
    let (cells, users, m) = (channels.cells, channels.users, channels.antennas);
    let pilots = &channels.pilots;
    let tau = pilots.first().map_or(0, Vec::len);
    let amplitude = pilot_power.sqrt();
    let noise_std = noise_power.sqrt();

    let estimates = (0..cells)
        .map(|j| {
            let mut y = vec![vec![Complex64::new(0.0, 0.0); tau]; m];
            for l in 0..cells {
                for (k, phi) in pilots.iter().enumerate() {
                    let g = channels.true_channel(j, l, k);
                    for (row, &gi) in y.iter_mut().zip(g) {
                        for (yt, &pt) in row.iter_mut().zip(phi) {
                            *yt += amplitude * gi * pt;
                        }
                    }
                }
            }
            for row in y.iter_mut() {
                for yt in row.iter_mut() {
                    *yt += noise_std * complex_gaussian(rng);
                }
            }
            (0..users)
                .map(|k| {
                    y.iter()
                        .map(|row| {
                            row.iter()
                                .zip(&pilots[k])
                                .map(|(yt, pt)| yt * pt.conj())
                                .sum::<Complex64>()
                                / amplitude
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    Ok(MultiCellChannels {
        estimates: Some(estimates),
        ..channels.clone()
    })
}
