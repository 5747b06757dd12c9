use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::convolution::convolution_decay_check;
use super::experiment::Check;
use crate::error::Result;
use crate::spectral::{bernstein_check, FrequencySplit, Grid, SpectralField};

/// Real broadband scalar field with coefficients uniform in the unit disc
/// times `1/(1+|xi|^2)` on every resolved mode and zero mean.
pub fn random_field(grid: Grid, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = vec![Complex64::default(); grid.len()];
    for p in 1..grid.len() {
        let q = grid.conj_index(p);
        if q <= p || !grid.is_resolved(p) {
            continue;
        }
        let env = 1.0 / (1.0 + grid.xi_norm(p).powi(2));
        let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * env;
        data[p] = v;
        data[q] = v.conj();
    }
    SpectralField::scalar(grid, data)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BernsteinRow {
    pub field: usize,
    pub m1: u32,
    pub m2: u32,
    pub value: f64,
}

/// [`bernstein_check`] on `count` random fields for every pair.
pub fn bernstein_sweep(
    grid: Grid,
    split: &FrequencySplit,
    pairs: &[(u32, u32)],
    count: usize,
    seed: u64,
) -> Result<Vec<BernsteinRow>> {
    let mut rows = Vec::with_capacity(count * pairs.len());
    for field in 0..count {
        let f = random_field(grid, seed.wrapping_add(field as u64));
        for &(m1, m2) in pairs {
            rows.push(BernsteinRow {
                field,
                m1,
                m2,
                value: bernstein_check(&f, m1, m2, split)?,
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvolutionRow {
    pub a: f64,
    pub b: f64,
    pub t: f64,
    pub ratio: f64,
    pub bound: f64,
}

/// Explicit constant with `int_0^t (1+t-s)^{-a}(1+s)^{-b} ds <= C (1+t)^{-b}`,
/// from splitting the integral at `t/2`.
pub fn convolution_bound(a: f64, b: f64) -> f64 {
    let near = 2f64.powf(b) / (a - 1.0);
    let far = if (b - 1.0).abs() < 1e-12 {
        1.0 / (std::f64::consts::E * (a - 1.0))
    } else {
        1.0 / (1.0 - b).abs()
    };
    near + 2f64.powf(a) * far
}

pub fn convolution_sweep(pairs: &[(f64, f64)], ts: &[f64]) -> Result<Vec<ConvolutionRow>> {
    let mut rows = Vec::new();
    for &(a, b) in pairs {
        let ratios = convolution_decay_check(a, b, ts)?;
        let bound = convolution_bound(a, b);
        rows.extend(ts.iter().zip(ratios).map(|(&t, ratio)| ConvolutionRow {
            a,
            b,
            t,
            ratio,
            bound,
        }));
    }
    Ok(rows)
}

pub const BERNSTEIN_TOL: f64 = 1e-10;

/// Pass/fail summary of both sweeps.
pub fn lemma_checks(bern: &[BernsteinRow], conv: &[ConvolutionRow]) -> Vec<Check> {
    let min = bern.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    let mut checks = vec![Check {
        name: "min bernstein margin".into(),
        value: min,
        target: None,
        tolerance: None,
        pass: min >= -BERNSTEIN_TOL,
    }];
    let mut pairs: Vec<(f64, f64)> = conv.iter().map(|r| (r.a, r.b)).collect();
    pairs.dedup();
    for (a, b) in pairs {
        let rows: Vec<&ConvolutionRow> = conv.iter().filter(|r| r.a == a && r.b == b).collect();
        let max = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        checks.push(Check {
            name: format!("max convolution ratio (a={a}, b={b})"),
            value: max,
            target: None,
            tolerance: None,
            pass: max.is_finite() && rows.iter().all(|r| r.ratio <= r.bound),
        });
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decay::log_times;

    #[test]
    fn random_field_is_real() {
        let f = random_field(Grid::periodic_cube(8).unwrap(), 3);
        assert!(f.hermitian_defect() == 0.0 && f.comps[0][0] == Complex64::default());
    }

    #[test]
    fn sweeps_pass() {
        let grid = Grid::cube(8, 4.0 * std::f64::consts::PI).unwrap();
        let split = FrequencySplit::new(1.0).unwrap();
        let bern = bernstein_sweep(grid, &split, &[(1, 0), (2, 1), (3, 1)], 10, 0).unwrap();
        let ts = log_times(10, 1.0, 1e4);
        let conv = convolution_sweep(&[(2.5, 1.5), (3.5, 0.5)], &ts).unwrap();
        let checks = lemma_checks(&bern, &conv);
        assert_eq!(checks.len(), 3);
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }

    #[test]
    fn bound_dominates_closed_form_case() {
        // b = 0: the integral is at most 1/(a-1).
        assert!(convolution_bound(2.0, 0.0) >= 1.0);
    }
}
