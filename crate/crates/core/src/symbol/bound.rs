use nalgebra::SMatrix;
use serde::Serialize;

use super::expm::{op_norm, semigroup};
use crate::error::Result;

/// Fit of `|exp(-tM(r))| <= C exp(-C5 r^2 t)` over a sample of `(r, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundFit {
    /// Largest rate with `C <= c_max`; 0 if even `C5 = 0` exceeds `c_max`.
    pub c5: f64,
    /// `max_{r,t} |exp(-tM)| exp(C5 r^2 t)` at the fitted rate.
    pub c: f64,
    /// `max_{r,t} |exp(-tM)|`.
    pub max_norm: f64,
}

/// Operator norms `|exp(-t M(r))|_2` with their `r^2 t`.
pub fn sample_norms<const N: usize>(
    radii: &[f64],
    times: &[f64],
    symbol: impl Fn(f64) -> SMatrix<f64, N, N> + Sync,
) -> Result<Vec<(f64, f64)>> {
    use rayon::prelude::*;
    let rows: Vec<Vec<(f64, f64)>> = radii
        .par_iter()
        .map(|&r| {
            let m = symbol(r);
            times
                .iter()
                .map(|&t| Ok((r * r * t, op_norm(&semigroup(&m, t)?))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Bisects for the largest `C5` with `max n exp(C5 s) <= c_max` over samples `(s, n)`.
pub fn fit_bound(samples: &[(f64, f64)], c_max: f64) -> BoundFit {
    let envelope = |c5: f64| {
        samples
            .iter()
            .fold(0.0f64, |a, &(s, n)| a.max(n * (c5 * s).exp()))
    };
    let max_norm = envelope(0.0);
    if max_norm > c_max {
        return BoundFit {
            c5: 0.0,
            c: max_norm,
            max_norm,
        };
    }
    let smax = samples.iter().fold(0.0f64, |a, &(s, _)| a.max(s));
    if smax == 0.0 {
        return BoundFit {
            c5: f64::INFINITY,
            c: max_norm,
            max_norm,
        };
    }
    let mut lo = 0.0;
    let mut hi = 1.0 / smax;
    while envelope(hi) <= c_max {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if envelope(mid) <= c_max {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    BoundFit {
        c5: lo,
        c: envelope(lo),
        max_norm,
    }
}

/// `t = 0` followed by `n - 1` log-spaced times on `[t_min, t_max]`.
pub fn bound_times(n: usize, t_min: f64, t_max: f64) -> Vec<f64> {
    let mut v = vec![0.0];
    if n > 1 {
        let k = n - 1;
        for i in 0..k {
            let f = if k == 1 {
                0.0
            } else {
                i as f64 / (k - 1) as f64
            };
            v.push(t_min * (t_max / t_min).powf(f));
        }
    }
    v
}
