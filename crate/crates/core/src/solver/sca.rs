//! Tangent lower bound of `log2(1 + s)` in `log s`.

use std::f64::consts::LN_2;

/// Per-user coefficients of `a·log2(s) + b ≤ log2(1 + s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaCoefficients {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl ScaCoefficients {
    /// `a = 1, b = 0`: valid but loose everywhere.
    pub fn cold(users: usize) -> Self {
        ScaCoefficients {
            a: vec![1.0; users],
            b: vec![0.0; users],
        }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `a_i·log2(s) + b_i`, in bit/s/Hz.
    #[inline]
    pub fn surrogate(&self, user: usize, s: f64) -> f64 {
        self.a[user] * s.ln() / LN_2 + self.b[user]
    }
}

/// Coefficients tight at `s_i = Γ·sinr_i`:
/// `a = s/(1+s)`, `b = log2(1+s) − a·log2(s)`.
///
/// `s` is clamped to at least `floor` so that a silent user still gets finite
/// coefficients.
pub fn sca_update(sinr: &[f64], gap: f64, floor: f64) -> ScaCoefficients {
    let (a, b) = sinr
        .iter()
        .map(|&x| {
            let s = (gap * x).max(floor);
            let a = s / (1.0 + s);
            let b = s.ln_1p() / LN_2 - a * s.ln() / LN_2;
            (a, b)
        })
        .unzip();
    ScaCoefficients { a, b }
}
