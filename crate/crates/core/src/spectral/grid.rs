use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid with `n` points per axis on a box of side lengths
/// `lengths`. Flat index of point (i, j, k) is `(i * n + j) * n + k`; the same
/// layout indexes Fourier modes in FFT order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    lengths: [f64; 3],
}

impl Grid {
    pub fn new(n: usize, lengths: [f64; 3]) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::param(
                "n",
                format!("must be a power of two >= 8, got {n}"),
            ));
        }
        if lengths.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::param(
                "lengths",
                format!("must be positive, got {lengths:?}"),
            ));
        }
        Ok(Grid { n, lengths })
    }

    /// The `[0, 2 pi)^3` box.
    pub fn periodic_cube(n: usize) -> Result<Self> {
        Self::new(n, [2.0 * PI; 3])
    }

    pub fn cube(n: usize, side: f64) -> Result<Self> {
        Self::new(n, [side; 3])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        [flat / (n * n), (flat / n) % n, flat % n]
    }

    /// Integer mode number in FFT order; the Nyquist index maps to `-n/2`.
    #[inline]
    pub fn signed_mode(&self, idx: usize) -> i64 {
        let n = self.n as i64;
        let i = idx as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Wavenumber `2 pi m / L` along `axis`. The Nyquist mode is assigned
    /// wavenumber 0 so that every derivative operator maps real fields to
    /// real fields and compositions such as div grad = laplacian hold exactly.
    #[inline]
    pub fn wavenumber(&self, axis: usize, idx: usize) -> f64 {
        if idx == self.n / 2 {
            0.0
        } else {
            2.0 * PI * self.signed_mode(idx) as f64 / self.lengths[axis]
        }
    }

    #[inline]
    pub fn xi(&self, flat: usize) -> [f64; 3] {
        let [i, j, k] = self.unflatten(flat);
        [
            self.wavenumber(0, i),
            self.wavenumber(1, j),
            self.wavenumber(2, k),
        ]
    }

    #[inline]
    pub fn xi_norm(&self, flat: usize) -> f64 {
        let x = self.xi(flat);
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    /// True if the mode survives the 2/3 dealiasing rule (`|m_i| <= n/3` on every axis).
    #[inline]
    pub fn is_resolved(&self, flat: usize) -> bool {
        let cut = (self.n / 3) as i64;
        self.unflatten(flat)
            .iter()
            .all(|&i| self.signed_mode(i).abs() <= cut)
    }

    /// Flat indices of the modes kept by the dealiasing mask.
    pub fn resolved_modes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&f| self.is_resolved(f)).collect()
    }

    /// Flat index of the mode `-m`.
    #[inline]
    pub fn conj_index(&self, flat: usize) -> usize {
        let n = self.n;
        let [i, j, k] = self.unflatten(flat);
        self.index((n - i) % n, (n - j) % n, (n - k) % n)
    }

    /// Physical coordinates of grid point `flat`.
    #[inline]
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let [i, j, k] = self.unflatten(flat);
        let h = |a: usize| self.lengths[a] / self.n as f64;
        [i as f64 * h(0), j as f64 * h(1), k as f64 * h(2)]
    }

    /// Smallest nonzero wavenumber magnitude.
    pub fn min_wavenumber(&self) -> f64 {
        self.lengths
            .iter()
            .map(|l| 2.0 * PI / l)
            .fold(f64::INFINITY, f64::min)
    }

    /// Grid spacing (smallest over the three axes).
    pub fn spacing(&self) -> f64 {
        self.lengths
            .iter()
            .fold(f64::INFINITY, |a, &l| a.min(l / self.n as f64))
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}
