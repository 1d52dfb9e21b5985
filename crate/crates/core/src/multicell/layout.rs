use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::sysmodel::{
    complex_gaussian_vec, draw_placement, draw_shadow_db, path_gain, ChannelSet,
};

/// A cluster of identical cells sharing one pilot set.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiCellParams {
    pub cells: usize,
    /// Parameters of every cell; `users` is the number of users per cell.
    pub system: SystemParams,
    /// Uplink pilot power `p_u` (W).
    pub pilot_power: f64,
    /// Pilot length `τ`, at least the number of users per cell.
    pub pilot_length: usize,
    /// Distance of the outer cell centers from the origin, in cell radii.
    pub ring_factor: f64,
}

impl MultiCellParams {
    /// `cells` cells with `system` parameters, `p_u = 0.1 W`, `τ = K` and
    /// outer centers at two cell radii.
    pub fn new(cells: usize, system: SystemParams) -> Self {
        MultiCellParams {
            cells,
            pilot_length: system.users,
            system,
            pilot_power: 0.1,
            ring_factor: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        if self.cells == 0 {
            return Err(Error::param("cells", "at least one cell required"));
        }
        if !(self.pilot_power > 0.0 && self.pilot_power.is_finite()) {
            return Err(Error::param("pilot_power", "must be positive and finite"));
        }
        if self.pilot_length < self.system.users {
            return Err(Error::param(
                "pilot_length",
                "must be at least the number of users per cell",
            ));
        }
        if !(self.ring_factor > 0.0 && self.ring_factor.is_finite()) {
            return Err(Error::param("ring_factor", "must be positive and finite"));
        }
        Ok(())
    }

    /// Cell 0 at the origin, the others evenly spaced on a ring of radius
    /// `ring_factor · cell_radius`.
    pub fn centers(&self) -> Vec<[f64; 2]> {
        let ring = self.ring_factor * self.system.cell_radius;
        let outer = self.cells.saturating_sub(1);
        std::iter::once([0.0, 0.0])
            .chain((0..outer).map(|i| {
                let a = 2.0 * PI * i as f64 / outer as f64;
                [ring * a.cos(), ring * a.sin()]
            }))
            .take(self.cells)
            .collect()
    }
}

/// Per-link storage indexed by `(base station j, cell l, user k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Links<T> {
    cells: usize,
    users: usize,
    data: Vec<T>,
}

impl<T> Links<T> {
    pub(crate) fn from_fn(
        cells: usize,
        users: usize,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Self {
        let mut data = Vec::with_capacity(cells * cells * users);
        for j in 0..cells {
            for l in 0..cells {
                for k in 0..users {
                    data.push(f(j, l, k));
                }
            }
        }
        Links { cells, users, data }
    }

    #[inline]
    pub fn get(&self, bs: usize, cell: usize, user: usize) -> &T {
        &self.data[(bs * self.cells + cell) * self.users + user]
    }
}

/// True channels of every base station to every user, the pilot matrix,
/// and (after estimation) the LS estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiCellChannels {
    pub(crate) cells: usize,
    pub(crate) users: usize,
    pub(crate) antennas: usize,
    pub(crate) beta: Links<f64>,
    pub(crate) distance: Links<f64>,
    pub(crate) h: Links<Vec<Complex64>>,
    pub(crate) g: Links<Vec<Complex64>>,
    pub(crate) pilots: Vec<Vec<Complex64>>,
    /// `ĝ_{jjk}` per `(j, k)`; with reuse it is also BS `j`'s estimate of
    /// user `k` of every other cell.
    pub(crate) estimates: Option<Vec<Vec<Vec<Complex64>>>>,
}

impl MultiCellChannels {
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    /// `β_{jlk}`.
    pub fn beta(&self, bs: usize, cell: usize, user: usize) -> f64 {
        *self.beta.get(bs, cell, user)
    }

    pub fn distance(&self, bs: usize, cell: usize, user: usize) -> f64 {
        *self.distance.get(bs, cell, user)
    }

    /// `g_{jlk}`: channel from base station `bs` to user `user` of `cell`.
    pub fn true_channel(&self, bs: usize, cell: usize, user: usize) -> &[Complex64] {
        self.g.get(bs, cell, user)
    }

    /// `ĝ_{jlk}`, if estimated. Equal for every `cell` under pilot reuse.
    pub fn estimate(&self, bs: usize, _cell: usize, user: usize) -> Option<&[Complex64]> {
        self.estimates.as_ref().map(|e| e[bs][user].as_slice())
    }

    /// `K × τ` pilot matrix shared by all cells.
    pub fn pilots(&self) -> &[Vec<Complex64>] {
        &self.pilots
    }

    pub fn is_estimated(&self) -> bool {
        self.estimates.is_some()
    }

    /// Base station `bs` and its own users as a single-cell channel set.
    pub fn own_cell(&self, bs: usize) -> ChannelSet {
        let beta = (0..self.users).map(|k| self.beta(bs, bs, k)).collect();
        let distance = (0..self.users).map(|k| self.distance(bs, bs, k)).collect();
        let h = (0..self.users)
            .map(|k| self.h.get(bs, bs, k).clone())
            .collect();
        ChannelSet::new(beta, distance, h).expect("own-cell channels are consistent")
    }

    /// Uses the true channels as estimates.
    pub fn with_perfect_estimates(mut self) -> Self {
        let est = (0..self.cells)
            .map(|j| {
                (0..self.users)
                    .map(|k| self.true_channel(j, j, k).to_vec())
                    .collect()
            })
            .collect();
        self.estimates = Some(est);
        self
    }
}

/// Rows of the `τ × τ` unitary DFT matrix, first `users` of them.
pub fn dft_pilots(users: usize, length: usize) -> Vec<Vec<Complex64>> {
    let scale = 1.0 / (length as f64).sqrt();
    (0..users)
        .map(|k| {
            (0..length)
                .map(|t| Complex64::from_polar(scale, -2.0 * PI * (k * t) as f64 / length as f64))
                .collect()
        })
        .collect()
}

/// Places users in their cells and draws every BS-user channel.
///
/// Draw order: positions of all users (cell by cell), then shadowing of
/// every link, then fast fading of every link, both base station by base
/// station. A one-cell layout therefore consumes the stream exactly as a
/// single-cell draw does.
pub fn layout_and_draw<R: Rng + ?Sized>(
    mc: &MultiCellParams,
    rng: &mut R,
) -> Result<MultiCellChannels> {
    mc.validate()?;
    let params = &mc.system;
    let (cells, users, antennas) = (mc.cells, params.users, params.antennas);
    let centers = mc.centers();

    let mut radius = Vec::with_capacity(cells * users);
    let mut position = Vec::with_capacity(cells * users);
    for center in &centers {
        for _ in 0..users {
            let p = draw_placement(params, rng);
            radius.push(p.radius);
            position.push([
                center[0] + p.radius * p.angle.cos(),
                center[1] + p.radius * p.angle.sin(),
            ]);
        }
    }
    let distance = Links::from_fn(cells, users, |j, l, k| {
        if j == l {
            radius[l * users + k]
        } else {
            let [x, y] = position[l * users + k];
            let [cx, cy] = centers[j];
            (x - cx).hypot(y - cy).max(params.min_distance)
        }
    });
    let beta = Links::from_fn(cells, users, |j, l, k| {
        path_gain(params, *distance.get(j, l, k), draw_shadow_db(params, rng))
    });
    let h = Links::from_fn(cells, users, |_, _, _| complex_gaussian_vec(antennas, rng));
    let g = Links::from_fn(cells, users, |j, l, k| {
        let s = beta.get(j, l, k).sqrt();
        h.get(j, l, k).iter().map(|&x| x * s).collect()
    });

    Ok(MultiCellChannels {
        cells,
        users,
        antennas,
        beta,
        distance,
        h,
        g,
        pilots: dft_pilots(users, mc.pilot_length),
        estimates: None,
    })
}
