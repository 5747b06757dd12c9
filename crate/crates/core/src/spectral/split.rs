use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use crate::error::{Error, Result};

/// Infinitely smooth step: 0 for `s <= 0`, 1 for `s >= 1`,
/// `1 / (1 + exp(1/s - 1/(1-s)))` in between.
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let x = 1.0 / s - 1.0 / (1.0 - s);
        if x > 700.0 {
            0.0
        } else if x < -700.0 {
            1.0
        } else {
            1.0 / (1.0 + x.exp())
        }
    }
}

/// Smooth low/high frequency decomposition with cutoff `c0`.
///
/// `phi0(|xi|) = 1 - smooth_step(2|xi|/c0 - 1)`, which equals 1 on
/// `|xi| <= c0/2`, vanishes on `|xi| >= c0` and is nonincreasing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencySplit {
    pub c0: f64,
}

impl Default for FrequencySplit {
    fn default() -> Self {
        FrequencySplit { c0: 0.5 }
    }
}

impl FrequencySplit {
    pub fn new(c0: f64) -> Result<Self> {
        if c0.is_finite() && c0 > 0.0 {
            Ok(FrequencySplit { c0 })
        } else {
            Err(Error::param("c0", format!("must be positive, got {c0}")))
        }
    }

    #[inline]
    pub fn phi0(&self, r: f64) -> f64 {
        1.0 - smooth_step(2.0 * r / self.c0 - 1.0)
    }

    /// Whether the cutoff reaches the first nonzero shell of `grid`; when it
    /// does not, the low part is the zero mode only.
    pub fn resolvable(&self, grid: &super::Grid) -> bool {
        self.c0 >= grid.min_wavenumber()
    }

    pub fn low(&self, f: &SpectralField) -> SpectralField {
        let g = f.grid;
        let mut out = f.clone();
        for p in 0..g.len() {
            let w = self.phi0(g.xi_norm(p));
            for c in out.comps.iter_mut() {
                c[p] *= w;
            }
        }
        out
    }

    pub fn high(&self, f: &SpectralField) -> SpectralField {
        let g = f.grid;
        let mut out = f.clone();
        for p in 0..g.len() {
            let w = 1.0 - self.phi0(g.xi_norm(p));
            for c in out.comps.iter_mut() {
                c[p] *= w;
            }
        }
        out
    }

    /// `(f^L, f^h)` with `f^h = f - f^L`.
    pub fn split(&self, f: &SpectralField) -> (SpectralField, SpectralField) {
        if !self.resolvable(&f.grid) {
            log::debug!(
                "cutoff {} below the first grid shell; low part is the mean only",
                self.c0
            );
        }
        let low = self.low(f);
        let high = f.sub(&low).expect("same grid");
        (low, high)
    }
}

/// `||grad^{m1} f|| - c0^{m1-m2} ||grad^{m2} f^h||`.
pub fn bernstein_check(f: &SpectralField, m1: u32, m2: u32, split: &FrequencySplit) -> Result<f64> {
    if m2 > m1 {
        return Err(Error::Domain(format!("need m2 <= m1, got ({m1}, {m2})")));
    }
    let lhs = f.grad_norm_sq(m1).sqrt();
    let high = split.high(f).grad_norm_sq(m2).sqrt();
    Ok(lhs - split.c0.powi((m1 - m2) as i32) * high)
}
