use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, Matrix4, SMatrix};
use serde::{Deserialize, Serialize};

use super::blocks::{SymbolMatrix2, SymbolMatrix4};
use super::expm::{semigroup, semigroup_pade};
use super::quadrature::{graded_breaks, CompositeRule};
use crate::error::{Error, Result};
use crate::model::Coeffs;

/// Constant Fourier data `U0(xi) = (rho, u, eta, w)` with `w = div tau`, the
/// transform of integrable initial data near `xi = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Profile {
    pub rho: f64,
    pub u: [f64; 3],
    pub eta: f64,
    pub w: [f64; 3],
}

impl Default for Profile {
    fn default() -> Self {
        Profile {
            rho: 1.0,
            u: [1.0, 0.0, 0.0],
            eta: 1.0,
            w: [1.0, 0.0, 0.0],
        }
    }
}

impl Profile {
    pub fn norm_sq(&self) -> f64 {
        self.rho * self.rho + self.eta * self.eta + dot(&self.u, &self.u) + dot(&self.w, &self.w)
    }

    pub fn is_zero(&self) -> bool {
        self.norm_sq() == 0.0
    }

    fn u2(&self) -> f64 {
        dot(&self.u, &self.u)
    }

    fn uw(&self) -> f64 {
        dot(&self.u, &self.w)
    }

    fn w2(&self) -> f64 {
        dot(&self.w, &self.w)
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    /// Minimum number of radial nodes of the coarse rule.
    pub min_nodes: usize,
    /// Gauss points per panel.
    pub per_panel: usize,
    /// Relative change allowed between a rule and its refinement.
    pub tol: f64,
    /// Refinements attempted before giving up.
    pub max_refinements: usize,
    /// Cross-check every matrix exponential against the eigenvector route.
    pub checked: bool,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            min_nodes: 2000,
            per_panel: 16,
            tol: 1e-8,
            max_refinements: 4,
            checked: true,
        }
    }
}

fn expm<const N: usize>(
    m: &SMatrix<f64, N, N>,
    t: f64,
    checked: bool,
) -> Result<SMatrix<f64, N, N>> {
    if checked {
        semigroup(m, t)
    } else {
        Ok(semigroup_pade(m, t))
    }
}

/// Rule on `[0, c0]` graded towards the diffusive scale `(1 + t)^{-1/2}` with
/// at least `min_nodes * 2^level` nodes.
fn rule(c0: f64, t: f64, q: &QuadConfig, level: usize) -> CompositeRule {
    let scale = 1.0 / (1.0 + t).sqrt();
    let base = graded_breaks(c0, scale, 1).len() - 1;
    let want = q.min_nodes << level;
    let split = want.div_ceil(base * q.per_panel).max(1);
    CompositeRule::new(&graded_breaks(c0, scale, split), q.per_panel)
}

/// Integrates `4 pi r^{2+2m} F(r)` for every `m` with one evaluation of `F`
/// per node, refining until all orders agree with their refinement.
fn radial_norms(
    ms: &[u32],
    c0: f64,
    t: f64,
    q: &QuadConfig,
    f: impl Fn(f64) -> Result<f64> + Sync,
) -> Result<Vec<f64>> {
    if !(c0 > 0.0) {
        return Err(Error::param("c0", "must be positive"));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
    }
    use rayon::prelude::*;
    let eval = |level: usize| -> Result<Vec<f64>> {
        let rule = rule(c0, t, q, level);
        let vals: Vec<f64> = rule
            .nodes
            .par_iter()
            .map(|&r| f(r))
            .collect::<Result<_>>()?;
        Ok(ms
            .iter()
            .map(|&m| {
                let s: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .zip(&vals)
                    .map(|((&r, &w), &v)| w * r.powi(2 + 2 * m as i32) * v)
                    .sum();
                4.0 * PI * s
            })
            .collect())
    };
    let mut prev = eval(0)?;
    let mut change = f64::INFINITY;
    for level in 1..=q.max_refinements {
        let next = eval(level)?;
        change = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| {
                if *b == 0.0 {
                    (a - b).abs()
                } else {
                    ((a - b) / b).abs()
                }
            })
            .fold(0.0, f64::max);
        prev = next;
        if change < q.tol {
            return Ok(prev.iter().map(|v| v.max(0.0).sqrt()).collect());
        }
    }
    Err(Error::Quadrature(change))
}

/// Angle-averaged `|exp(-t A_xi) U0|^2` at radius `r`.
pub fn angular_energy(r: f64, t: f64, p: &Profile, c: &Coeffs, checked: bool) -> Result<f64> {
    let e4: Matrix4<f64> = expm(&SymbolMatrix4::new(r, c).m, t, checked)?;
    let e2: Matrix2<f64> = expm(&SymbolMatrix2::new(r, c).m, t, checked)?;
    let real = e4.column(0) * p.rho + e4.column(2) * p.eta;
    let (c2, c4) = (e4.column(1), e4.column(3));
    let longitudinal =
        (p.u2() * c2.norm_squared() + 2.0 * p.uw() * c2.dot(&c4) + p.w2() * c4.norm_squared())
            / 3.0;
    let (d1, d2) = (e2.column(0), e2.column(1));
    let transverse = 2.0 / 3.0
        * (p.u2() * d1.norm_squared() + 2.0 * p.uw() * d1.dot(&d2) + p.w2() * d2.norm_squared());
    Ok(real.norm_squared() + longitudinal + transverse)
}

/// `(int_{|xi| <= c0} |xi|^{2m} |exp(-t A_xi) U0|^2 dxi)^{1/2}` for each `m`.
pub fn lowfreq_decay_norms(
    ms: &[u32],
    t: f64,
    p: &Profile,
    c0: f64,
    c: &Coeffs,
    q: &QuadConfig,
) -> Result<Vec<f64>> {
    radial_norms(ms, c0, t, q, |r| angular_energy(r, t, p, c, q.checked))
}

pub fn lowfreq_decay_norm(
    m: u32,
    t: f64,
    p: &Profile,
    c0: f64,
    c: &Coeffs,
    q: &QuadConfig,
) -> Result<f64> {
    Ok(lowfreq_decay_norms(&[m], t, p, c0, c, q)?[0])
}

/// Scalar benchmark with `exp(-t A_xi)` replaced by `exp(-r^2 t)`.
pub fn heat_decay_norms(
    ms: &[u32],
    t: f64,
    amplitude: f64,
    c0: f64,
    q: &QuadConfig,
) -> Result<Vec<f64>> {
    radial_norms(ms, c0, t, q, |r| {
        Ok(amplitude * amplitude * (-2.0 * r * r * t).exp())
    })
}

/// Initial stress `tau0` (symmetric, in the component order of the stress type)
/// added to a velocity profile for the driven stress equation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DrivenProfile {
    pub base: Profile,
    pub tau0: [f64; 6],
}

/// Rows of the Duhamel integrals `int_0^t exp(-a(t-s)) e^T exp(-s M) ds`
/// for the longitudinal velocity of the compressible block (`g`) and the
/// transverse velocity of the incompressible block (`h`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DuhamelRows {
    pub g: [f64; 4],
    pub h: [f64; 2],
}

impl DuhamelRows {
    pub fn max_abs_diff(&self, o: &DuhamelRows) -> f64 {
        self.g
            .iter()
            .zip(&o.g)
            .chain(self.h.iter().zip(&o.h))
            .fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }
}

fn damping(r: f64, c: &Coeffs) -> f64 {
    c.relax() + c.eps() * r * r
}

/// Exact rows from the exponential of the augmented generator.
pub fn duhamel_rows(r: f64, t: f64, c: &Coeffs, checked: bool) -> Result<DuhamelRows> {
    let a = damping(r, c);
    let m4 = SymbolMatrix4::new(r, c).m;
    let mut b5 = SMatrix::<f64, 5, 5>::zeros();
    b5.fixed_view_mut::<4, 4>(0, 0).copy_from(&m4);
    b5[(4, 1)] = -1.0;
    b5[(4, 4)] = a;
    let m2 = SymbolMatrix2::new(r, c).m;
    let mut b3 = Matrix3::<f64>::zeros();
    b3.fixed_view_mut::<2, 2>(0, 0).copy_from(&m2);
    b3[(2, 0)] = -1.0;
    b3[(2, 2)] = a;
    let e5 = expm(&b5, t, checked)?;
    let e3 = expm(&b3, t, checked)?;
    Ok(DuhamelRows {
        g: [e5[(4, 0)], e5[(4, 1)], e5[(4, 2)], e5[(4, 3)]],
        h: [e3[(2, 0)], e3[(2, 1)]],
    })
}

/// The same rows by composite Gauss-Legendre quadrature in `s`.
pub fn duhamel_rows_quadrature(
    r: f64,
    t: f64,
    c: &Coeffs,
    panels: usize,
    per_panel: usize,
) -> DuhamelRows {
    let a = damping(r, c);
    let m4 = SymbolMatrix4::new(r, c).m;
    let m2 = SymbolMatrix2::new(r, c).m;
    let breaks: Vec<f64> = (0..=panels).map(|i| t * i as f64 / panels as f64).collect();
    let rule = CompositeRule::new(&breaks, per_panel);
    let mut g = [0.0; 4];
    let mut h = [0.0; 2];
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        let k = w * (-a * (t - s)).exp();
        let e4 = semigroup_pade(&m4, s);
        let e2 = semigroup_pade(&m2, s);
        for j in 0..4 {
            g[j] += k * e4[(1, j)];
        }
        for j in 0..2 {
            h[j] += k * e2[(0, j)];
        }
    }
    DuhamelRows { g, h }
}

/// The same rows by RK4 on the coupled mode-plus-stress system.
pub fn duhamel_rows_rk4(r: f64, t: f64, c: &Coeffs, step: f64) -> DuhamelRows {
    let a = damping(r, c);
    let m4 = SymbolMatrix4::new(r, c).m;
    let m2 = SymbolMatrix2::new(r, c).m;
    let mut g = [0.0; 4];
    for (j, gj) in g.iter_mut().enumerate() {
        let mut x = nalgebra::Vector4::zeros();
        x[j] = 1.0;
        *gj = rk4_driven(|y| -(m4 * y), |y| y[1], x, a, t, step);
    }
    let mut h = [0.0; 2];
    for (j, hj) in h.iter_mut().enumerate() {
        let mut x = nalgebra::Vector2::zeros();
        x[j] = 1.0;
        *hj = rk4_driven(|y| -(m2 * y), |y| y[0], x, a, t, step);
    }
    DuhamelRows { g, h }
}

fn rk4_driven<const N: usize>(
    f: impl Fn(&SMatrix<f64, N, 1>) -> SMatrix<f64, N, 1>,
    drive: impl Fn(&SMatrix<f64, N, 1>) -> f64,
    x0: SMatrix<f64, N, 1>,
    a: f64,
    t: f64,
    step: f64,
) -> f64 {
    let n = (t / step).ceil().max(1.0) as usize;
    let h = t / n as f64;
    let rhs = |x: &SMatrix<f64, N, 1>, y: f64| (f(x), drive(x) - a * y);
    let (mut x, mut y) = (x0, 0.0);
    for _ in 0..n {
        let (k1x, k1y) = rhs(&x, y);
        let (k2x, k2y) = rhs(&(x + k1x * (h / 2.0)), y + k1y * h / 2.0);
        let (k3x, k3y) = rhs(&(x + k2x * (h / 2.0)), y + k2y * h / 2.0);
        let (k4x, k4y) = rhs(&(x + k3x * h), y + k3y * h);
        x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
        y += (k1y + 2.0 * k2y + 2.0 * k3y + k4y) * h / 6.0;
    }
    y
}

/// Angle-averaged `|tau(xi, t)|^2` (Frobenius) at radius `r` for
/// `tau_t + (A0/(2 lambda) + eps r^2) tau = beta k eta (i xi (x) u + u (x) i xi)`.
pub fn driven_energy(r: f64, t: f64, p: &DrivenProfile, c: &Coeffs, checked: bool) -> Result<f64> {
    let b = &p.base;
    let rows = duhamel_rows(r, t, c, checked)?;
    let g = rows.g;
    let y_re = g[0] * b.rho + g[2] * b.eta;
    let y_d = y_re * y_re
        + (g[1] * g[1] * b.u2() + 2.0 * g[1] * g[3] * b.uw() + g[3] * g[3] * b.w2()) / 3.0;
    let h = rows.h;
    let y_e =
        2.0 / 3.0 * (h[0] * h[0] * b.u2() + 2.0 * h[0] * h[1] * b.uw() + h[1] * h[1] * b.w2());
    let bke = c.bke();
    let driven = bke * bke * r * r * (4.0 * y_d + 2.0 * y_e);
    let tau0 = crate::model::StressTensor(p.tau0);
    if tau0.frobenius_sq() == 0.0 {
        return Ok(driven);
    }
    let decay = (-damping(r, c) * t).exp();
    let cross = 2.0 * decay * 2.0 * r * bke * y_re * tau0.trace() / 3.0;
    Ok(decay * decay * tau0.frobenius_sq() + cross + driven)
}

/// `(int_{|xi| <= c0} |xi|^{2m} |tau(xi, t)|^2 dxi)^{1/2}` for each `m`.
pub fn driven_tau_norms(
    ms: &[u32],
    t: f64,
    p: &DrivenProfile,
    c0: f64,
    c: &Coeffs,
    q: &QuadConfig,
) -> Result<Vec<f64>> {
    radial_norms(ms, c0, t, q, |r| driven_energy(r, t, p, c, q.checked))
}

pub fn driven_tau_decay(
    m: u32,
    t: f64,
    p: &DrivenProfile,
    c0: f64,
    c: &Coeffs,
    q: &QuadConfig,
) -> Result<f64> {
    Ok(driven_tau_norms(&[m], t, p, c0, c, q)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    fn coeffs() -> Coeffs {
        Coeffs::new(ModelParams::default()).unwrap()
    }

    fn quick() -> QuadConfig {
        QuadConfig {
            min_nodes: 200,
            ..Default::default()
        }
    }

    #[test]
    fn initial_norm_is_ball_volume() {
        let c = coeffs();
        let p = Profile::default();
        let c0 = 0.4;
        let v = lowfreq_decay_norm(0, 0.0, &p, c0, &c, &quick()).unwrap();
        let want = (p.norm_sq() * 4.0 * PI * c0.powi(3) / 3.0).sqrt();
        assert!((v - want).abs() < 1e-12 * want);
    }

    #[test]
    fn heat_benchmark_closed_form() {
        // int_0^c0 exp(-2 r^2 t) r^2 dr in closed form.
        let (c0, t) = (0.5, 30.0);
        let v = heat_decay_norms(&[0], t, 1.0, c0, &quick()).unwrap()[0];
        let k = 2.0 * t;
        let erf = statrs::function::erf::erf(c0 * k.sqrt());
        let integral =
            PI.sqrt() / (4.0 * k.powf(1.5)) * erf - c0 * (-k * c0 * c0).exp() / (2.0 * k);
        let want = (4.0 * PI * integral).sqrt();
        assert!((v - want).abs() < 1e-10 * want);
    }

    #[test]
    fn zero_driving_decays_exponentially() {
        let c = coeffs();
        let p = DrivenProfile {
            base: Profile {
                rho: 0.0,
                u: [0.0; 3],
                eta: 0.0,
                w: [0.0; 3],
            },
            tau0: [1.0, 0.5, -0.3, 0.2, 0.0, 0.1],
        };
        let q = quick();
        let n0 = driven_tau_decay(0, 0.0, &p, 0.3, &c, &q).unwrap();
        let n1 = driven_tau_decay(0, 2.0, &p, 0.3, &c, &q).unwrap();
        assert!(n1 <= n0 * (-c.relax() * 2.0).exp() * (1.0 + 1e-12));
    }

    #[test]
    fn driven_starts_from_initial_stress() {
        let c = coeffs();
        let p = DrivenProfile::default();
        assert_eq!(
            driven_tau_decay(0, 0.0, &p, 0.3, &c, &quick()).unwrap(),
            0.0
        );
    }

    #[test]
    fn duhamel_routes_agree() {
        let c = coeffs();
        for (r, t) in [(0.05, 3.0), (0.3, 17.0), (0.45, 40.0)] {
            let exact = duhamel_rows(r, t, &c, true).unwrap();
            let quad = duhamel_rows_quadrature(r, t, &c, (4.0 * t) as usize, 16);
            let rk = duhamel_rows_rk4(r, t, &c, 1e-2);
            assert!(exact.max_abs_diff(&quad) < 1e-10, "{r} {t}");
            assert!(exact.max_abs_diff(&rk) < 1e-8, "{r} {t}");
        }
    }
}
