use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;

/// Three-dimensional complex FFT on an `n^3` grid built from 1D plans.
///
/// Forward transforms are normalized by `1/n^3`, so the coefficient of the
/// zero mode is the mean of the field and `f(x) = sum_k f_k exp(i k.x)`.
#[derive(Clone)]
pub struct Fft3 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn for_grid(grid: &Grid) -> Self {
        Self::new(grid.n())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(
            data.len(),
            n * n * n,
            "buffer does not match the transform size"
        );
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        // Last axis is contiguous.
        plan.process_with_scratch(data, &mut scratch);
        let mut lines = vec![Complex64::default(); n * n * n];
        // Middle axis: gather lines of stride n inside each slab.
        for i in 0..n {
            let slab = &mut data[i * n * n..(i + 1) * n * n];
            let buf = &mut lines[i * n * n..(i + 1) * n * n];
            for j in 0..n {
                for k in 0..n {
                    buf[k * n + j] = slab[j * n + k];
                }
            }
        }
        plan.process_with_scratch(&mut lines, &mut scratch);
        for i in 0..n {
            let slab = &mut data[i * n * n..(i + 1) * n * n];
            let buf = &lines[i * n * n..(i + 1) * n * n];
            for j in 0..n {
                for k in 0..n {
                    slab[j * n + k] = buf[k * n + j];
                }
            }
        }
        // First axis: lines of stride n^2.
        for i in 0..n {
            for jk in 0..n * n {
                lines[jk * n + i] = data[i * n * n + jk];
            }
        }
        plan.process_with_scratch(&mut lines, &mut scratch);
        for i in 0..n {
            for jk in 0..n * n {
                data[i * n * n + jk] = lines[jk * n + i];
            }
        }
    }

    pub fn forward_in_place(&self, data: &mut [Complex64]) {
        self.transform(data, &self.fwd);
        let s = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|c| *c *= s);
    }

    pub fn inverse_in_place(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inv);
    }

    pub fn forward_real(&self, f: &[f64]) -> Vec<Complex64> {
        let mut d: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_in_place(&mut d);
        d
    }

    /// Inverse transform keeping the real part; exact for Hermitian spectra.
    pub fn inverse_real(&self, spec: &[Complex64]) -> Vec<f64> {
        let mut d = spec.to_vec();
        self.inverse_in_place(&mut d);
        d.into_iter().map(|c| c.re).collect()
    }

    /// Forward transform of two real fields with a single complex FFT.
    pub fn forward_real_pair(&self, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut d: Vec<Complex64> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| Complex64::new(x, y))
            .collect();
        self.forward_in_place(&mut d);
        let n = self.n;
        let len = d.len();
        let mut fa = vec![Complex64::default(); len];
        let mut fb = vec![Complex64::default(); len];
        for i in 0..n {
            let ci = (n - i) % n;
            for j in 0..n {
                let cj = (n - j) % n;
                for k in 0..n {
                    let ck = (n - k) % n;
                    let z = d[(i * n + j) * n + k];
                    let zc = d[(ci * n + cj) * n + ck].conj();
                    let f = (i * n + j) * n + k;
                    fa[f] = 0.5 * (z + zc);
                    fb[f] = Complex64::new(0.0, -0.5) * (z - zc);
                }
            }
        }
        (fa, fb)
    }

    /// Inverse transform of two Hermitian spectra with a single complex FFT.
    pub fn inverse_real_pair(&self, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let i = Complex64::new(0.0, 1.0);
        let mut d: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| x + i * y).collect();
        self.inverse_in_place(&mut d);
        d.into_iter().map(|c| (c.re, c.im)).unzip()
    }

    /// Inverse transforms of many Hermitian spectra, paired two per FFT.
    pub fn inverse_real_many(&self, specs: &[&[Complex64]]) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(specs.len());
        for chunk in specs.chunks(2) {
            if chunk.len() == 2 {
                let (x, y) = self.inverse_real_pair(chunk[0], chunk[1]);
                out.push(x);
                out.push(y);
            } else {
                out.push(self.inverse_real(chunk[0]));
            }
        }
        out
    }

    /// Forward transforms of many real fields, paired two per FFT.
    pub fn forward_real_many(&self, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
        let mut out = Vec::with_capacity(fields.len());
        for chunk in fields.chunks(2) {
            if chunk.len() == 2 {
                let (x, y) = self.forward_real_pair(chunk[0], chunk[1]);
                out.push(x);
                out.push(y);
            } else {
                out.push(self.forward_real(chunk[0]));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_naive_dft() {
        let n = 8;
        let g = Grid::periodic_cube(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fast = Fft3::new(n).forward_real(&f);
        for probe in [0, 1, 9, 77, 300, 511] {
            let [a, b, c] = g.unflatten(probe);
            let mut acc = Complex64::default();
            for (p, &v) in f.iter().enumerate() {
                let [i, j, k] = g.unflatten(p);
                let phase =
                    -2.0 * std::f64::consts::PI * ((a * i + b * j + c * k) as f64) / n as f64;
                acc += v * Complex64::from_polar(1.0, phase);
            }
            acc /= g.len() as f64;
            assert!((acc - fast[probe]).norm() < 1e-13);
        }
    }

    #[test]
    fn paired_transforms_match_single() {
        let n = 16;
        let fft = Fft3::new(n);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a: Vec<f64> = (0..n * n * n)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let b: Vec<f64> = (0..n * n * n)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let (fa, fb) = fft.forward_real_pair(&a, &b);
        let sa = fft.forward_real(&a);
        let sb = fft.forward_real(&b);
        for i in 0..a.len() {
            assert!((fa[i] - sa[i]).norm() < 1e-14);
            assert!((fb[i] - sb[i]).norm() < 1e-14);
        }
        let (ra, rb) = fft.inverse_real_pair(&fa, &fb);
        for i in 0..a.len() {
            assert!((ra[i] - a[i]).abs() < 1e-13);
            assert!((rb[i] - b[i]).abs() < 1e-13);
        }
    }
}
