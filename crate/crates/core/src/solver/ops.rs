use num_complex::Complex64;

use crate::spectral::{Fft3, Grid};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Per-grid transform plans, wavenumber tables and the dealiasing mask.
#[derive(Clone, Debug)]
pub(crate) struct Ops {
    pub grid: Grid,
    pub fft: Fft3,
    pub k: [Vec<f64>; 3],
    pub k2: Vec<f64>,
    pub mask: Vec<bool>,
}

impl Ops {
    pub fn new(grid: Grid) -> Self {
        let len = grid.len();
        let mut k = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
        let mut k2 = vec![0.0; len];
        let mut mask = vec![false; len];
        for p in 0..len {
            let xi = grid.xi(p);
            for a in 0..3 {
                k[a][p] = xi[a];
            }
            k2[p] = xi.iter().map(|x| x * x).sum();
            mask[p] = grid.is_resolved(p);
        }
        Ops {
            grid,
            fft: Fft3::for_grid(&grid),
            k,
            k2,
            mask,
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn phys(&self, specs: &[&[Complex64]]) -> Vec<Vec<f64>> {
        self.fft.inverse_real_many(specs)
    }

    /// Forward transforms followed by dealiasing.
    pub fn spec(&self, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
        let mut out = self.fft.forward_real_many(fields);
        for s in out.iter_mut() {
            self.dealias(s);
        }
        out
    }

    pub fn dealias(&self, s: &mut [Complex64]) {
        for (v, &keep) in s.iter_mut().zip(&self.mask) {
            if !keep {
                *v = Complex64::default();
            }
        }
    }

    /// `d_axis f`.
    pub fn deriv(&self, s: &[Complex64], axis: usize) -> Vec<Complex64> {
        s.iter()
            .zip(&self.k[axis])
            .map(|(v, &k)| I * k * v)
            .collect()
    }

    /// `sum_l d_l f_l`.
    pub fn div(&self, f: [&[Complex64]; 3]) -> Vec<Complex64> {
        (0..self.len())
            .map(|p| I * (self.k[0][p] * f[0][p] + self.k[1][p] * f[1][p] + self.k[2][p] * f[2][p]))
            .collect()
    }
}
