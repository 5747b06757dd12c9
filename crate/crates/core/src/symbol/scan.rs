use nalgebra::{SMatrix, Vector2, Vector4};
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::blocks::{SymbolMatrix2, SymbolMatrix4};
use super::lyapunov::{certificate2, certificate4, two_block_admissible, Certificate};
use super::modes::a1_denominator;
use crate::error::{Error, Result};
use crate::model::Coeffs;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// Largest radius scanned.
    pub r_max: f64,
    /// Number of radii in `(0, r_max]`.
    pub points: usize,
    /// When set, radii are log-spaced on `[r_min, r_max]` instead of uniform.
    pub r_min: Option<f64>,
    /// Random unit states checked per radius and block.
    pub samples: usize,
    pub seed: u64,
    /// A radius is certified only while its rate constant stays above this
    /// fraction of the rate constant at the smallest radius. With 0 every
    /// radius with a positive rate constant qualifies.
    pub kappa_fraction: f64,
    /// Overrides the default Lyapunov cross weight.
    pub eps_tilde: Option<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            r_max: 1.0,
            points: 200,
            r_min: None,
            samples: 50,
            seed: 0,
            kappa_fraction: 0.0,
            eps_tilde: None,
        }
    }
}

impl ScanConfig {
    pub fn radii(&self) -> Vec<f64> {
        match self.r_min {
            Some(lo) if self.points > 1 => {
                let ratio = (self.r_max / lo).ln() / (self.points - 1) as f64;
                (0..self.points)
                    .map(|i| lo * (ratio * i as f64).exp())
                    .collect()
            }
            _ => (1..=self.points)
                .map(|i| self.r_max * i as f64 / self.points as f64)
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub r: f64,
    pub min_re_eig4: f64,
    pub min_re_eig2: f64,
    pub kappa4: f64,
    pub kappa2: f64,
    /// Per-radius admissibility of each block before the prefix rule.
    pub ok4: bool,
    pub ok2: bool,
    /// `r <= c0`.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    pub eps_tilde: f64,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c0: Option<f64>,
    /// Minimum rate constant over the certified radii of each block.
    pub kappa4: Option<f64>,
    pub kappa2: Option<f64>,
}

fn unit_state<const N: usize>(rng: &mut ChaCha8Rng) -> SMatrix<Complex64, N, 1> {
    loop {
        let x = SMatrix::<Complex64, N, 1>::from_fn(|_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let n = x.norm();
        if n > 1e-3 {
            return x / Complex64::from(n);
        }
    }
}

/// Counts sampled states violating `dL/dt <= -kappa r^2 L`.
pub fn count_violations<const N: usize>(
    cert: &Certificate<N>,
    kappa: f64,
    samples: usize,
    seed: u64,
) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r2 = cert.r * cert.r;
    (0..samples)
        .filter(|_| {
            let x = unit_state::<N>(&mut rng);
            let l = cert.value(&x);
            let rate = cert.rate(&x);
            rate > -kappa * r2 * l + 1e-13 * l
        })
        .count()
}

fn min_re<const N: usize>(m: &SMatrix<f64, N, N>) -> f64 {
    super::expm::dyn_of(m)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min)
}

/// Scans radii for the largest prefix on which both Lyapunov certificates hold.
pub fn scan_critical_radius(c: &Coeffs, cfg: &ScanConfig) -> Result<ScanResult> {
    if cfg.points == 0
        || !(cfg.r_max > 0.0)
        || cfg.r_min.is_some_and(|lo| !(lo > 0.0 && lo < cfg.r_max))
    {
        return Err(Error::Config(
            "scan needs points > 0 and 0 < r_min < r_max".into(),
        ));
    }
    let eps_tilde = cfg.eps_tilde.unwrap_or_else(|| c.eps_tilde());
    let radii = cfg.radii();
    let raw: Vec<(f64, f64, f64, f64, f64, bool, bool)> = radii
        .par_iter()
        .enumerate()
        .map(|(i, &r)| {
            let e4 = min_re(&SymbolMatrix4::new(r, c).m);
            let e2 = min_re(&SymbolMatrix2::new(r, c).m);
            let seed = cfg.seed.wrapping_add(2 * i as u64);
            let (k4, ok4) = if eps_tilde * r <= 1.0 && a1_denominator(r, c) > 0.0 {
                match certificate4(r, eps_tilde, c) {
                    Ok(cert) => match cert.kappa() {
                        Some(k) if k > 0.0 => {
                            (k, count_violations(&cert, k, cfg.samples, seed) == 0)
                        }
                        Some(k) => (k, false),
                        None => (f64::NAN, false),
                    },
                    Err(_) => (f64::NAN, false),
                }
            } else {
                (f64::NAN, false)
            };
            let cert2 = certificate2(r, c);
            let (k2, ok2) = match cert2.kappa() {
                Some(k) if k > 0.0 && two_block_admissible(r, c) => {
                    (k, count_violations(&cert2, k, cfg.samples, seed + 1) == 0)
                }
                Some(k) => (k, false),
                None => (f64::NAN, false),
            };
            (r, e4, e2, k4, k2, ok4, ok2)
        })
        .collect();

    let prefix =
        |kappa: &dyn Fn(usize) -> f64, ok: &dyn Fn(usize) -> bool| -> (Option<f64>, Option<f64>) {
            if raw.is_empty() || !ok(0) {
                return (None, None);
            }
            let floor = cfg.kappa_fraction * kappa(0);
            let mut last = None;
            let mut kmin = f64::INFINITY;
            for i in 0..raw.len() {
                if !ok(i) || kappa(i) < floor {
                    break;
                }
                last = Some(raw[i].0);
                kmin = kmin.min(kappa(i));
            }
            (last, last.map(|_| kmin))
        };
    let (c1, kappa4) = prefix(&|i| raw[i].3, &|i| raw[i].5);
    let (c2, kappa2) = prefix(&|i| raw[i].4, &|i| raw[i].6);
    let c0 = match (c1, c2) {
        (Some(a), Some(b)) => Some(a.min(b)),
        _ => None,
    };
    if c0.is_none() {
        log::warn!("no radius certified; parameters may be pathological");
    }
    let rows = raw
        .iter()
        .map(|&(r, e4, e2, k4, k2, ok4, ok2)| ScanRow {
            r,
            min_re_eig4: e4,
            min_re_eig2: e2,
            kappa4: k4,
            kappa2: k2,
            ok4,
            ok2,
            certified: c0.is_some_and(|c0| r <= c0),
        })
        .collect();
    Ok(ScanResult {
        rows,
        eps_tilde,
        c1,
        c2,
        c0,
        kappa4,
        kappa2,
    })
}

/// Random unit states `(rho, d, eta, q)`.
pub fn random_states4(n: usize, seed: u64) -> Vec<Vector4<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| unit_state::<4>(&mut rng)).collect()
}

/// Random unit states `(Pu, P div tau)`.
pub fn random_states2(n: usize, seed: u64) -> Vec<Vector2<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| unit_state::<2>(&mut rng)).collect()
}
