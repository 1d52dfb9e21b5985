//! Maximum ratio transmission and the link-gain matrix.

use num_complex::Complex64;

use super::channel::ChannelSet;
use crate::error::{Error, Result};

/// `g · w` with `g` a row vector and `w` a column vector (no conjugation).
pub fn project(g: &[Complex64], w: &[Complex64]) -> Complex64 {
    g.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// `|g · w|²`.
pub fn link_gain(g: &[Complex64], w: &[Complex64]) -> f64 {
    project(g, w).norm_sqr()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `w = g^H / ‖g‖`, so that `g · w = ‖g‖`.
pub fn mrt(g: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = norm(g);
    if n > 0.0 && n.is_finite() {
        Some(g.iter().map(|x| x.conj() / n).collect())
    } else {
        None
    }
}

/// Unit-norm beam per user.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformers {
    w: Vec<Vec<Complex64>>,
}

impl Beamformers {
    pub fn from_vectors(w: Vec<Vec<Complex64>>) -> Self {
        Beamformers { w }
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

pub fn mrt_beamformers(channels: &ChannelSet) -> Result<Beamformers> {
    mrt_all(channels.composite()).map(Beamformers::from_vectors)
}

pub(crate) fn mrt_all(g: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    g.iter()
        .enumerate()
        .map(|(user, gi)| mrt(gi).ok_or(Error::DegenerateChannel { user }))
        .collect()
}

/// Square matrix of `|g_n · w_u|²`: row `n` is the receiving user, column
/// `u` the beam.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    n: usize,
    data: Vec<f64>,
}

impl GainMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for user in 0..n {
            for beam in 0..n {
                data.push(f(user, beam));
            }
        }
        GainMatrix { n, data }
    }

    pub fn from_channels(channels: &ChannelSet, beams: &Beamformers) -> Self {
        let g = channels.composite();
        let w = beams.vectors();
        GainMatrix::from_fn(g.len(), |n, u| link_gain(&g[n], &w[u]))
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, user: usize, beam: usize) -> f64 {
        self.data[user * self.n + beam]
    }

    /// Gains seen by `user` from every beam.
    #[inline]
    pub fn row(&self, user: usize) -> &[f64] {
        &self.data[user * self.n..(user + 1) * self.n]
    }
}
