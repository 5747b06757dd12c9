use serde::Serialize;

use super::weights::FunctionalWeights;
use crate::error::{Error, Result};
use crate::model::Coeffs;
use crate::solver::FieldState;
use crate::spectral::{Fft3, FrequencySplit, Grid, SpectralField};

/// `||grad^m f||_{L^2}`.
pub fn sobolev_norm(f: &SpectralField, m: u32) -> f64 {
    f.grad_norm_sq(m).sqrt()
}

/// `||f||_{H^k} = (sum_{j<=k} ||grad^j f||^2)^{1/2}`.
pub fn h_norm(f: &SpectralField, k: u32) -> f64 {
    (0..=k).map(|j| f.grad_norm_sq(j)).sum::<f64>().sqrt()
}

/// Every ingredient of the functionals at one time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergySample {
    pub t: f64,
    /// `||grad^j f||^2` for `j = 0..=4`, per field `(rho, u, eta, tau)`.
    pub norms: [[f64; 5]; 4],
    /// `int grad^l u : grad^{l+1} rho`, `l = 0, 1, 2`.
    pub cross_u_rho: [f64; 3],
    /// `int grad^l div tau : grad^l u`, `l = 0, 1, 2`.
    pub cross_tau_u: [f64; 3],
    /// `int grad^2 u : grad^3 rho^h` and `int grad^2 div tau : grad^2 u^h`.
    pub cross_high: [f64; 2],
    /// `int (h(rho) + beta rho)/(r1 + beta rho) |grad^3 rho|^2`.
    pub density_term: f64,
    /// `sup |h(rho) + beta rho|/(r1 + beta rho)`.
    pub density_sup: f64,
    /// `||grad^l rho^L||^2 + ||grad^l u^L||^2 + ||grad^l eta^L||^2`, `l = 1, 2, 3`.
    pub low: [f64; 3],
    /// `||grad^3 rho^h||^2`, `||grad^3 u^h||^2`, `||grad^3 rho^L||^2`, `||grad^3 u^L||^2`.
    pub split3: [f64; 4],
    /// `||(rho, u, eta, tau)||_{H^3}`.
    pub h3: f64,
    /// Viscous `||grad u||_{H^3}^2` and `||div u||_{H^3}^2`.
    pub viscous: [f64; 2],
}

/// Evaluates [`EnergySample`]s and the functionals built from them.
pub struct Energy {
    pub coeffs: Coeffs,
    pub weights: FunctionalWeights,
    split: FrequencySplit,
    fft: Fft3,
    grid: Grid,
}

impl Energy {
    pub fn new(grid: Grid, coeffs: Coeffs, weights: FunctionalWeights) -> Result<Self> {
        weights.check(&coeffs)?;
        Ok(Energy {
            coeffs,
            split: FrequencySplit::new(weights.c0)?,
            weights,
            fft: Fft3::for_grid(&grid),
            grid,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn eta_weight(&self) -> f64 {
        self.coeffs.eta_weight()
    }

    pub fn tau_weight(&self) -> f64 {
        self.coeffs.tau_weight()
    }

    pub fn sample(&self, t: f64, s: &FieldState) -> Result<EnergySample> {
        if s.grid() != self.grid {
            return Err(Error::GridMismatch(
                "state grid differs from the energy grid".into(),
            ));
        }
        let fields = s.fields();
        let norms = fields.map(|f| std::array::from_fn(|j| f.grad_norm_sq(j as u32)));
        let grad_rho = s.rho.gradient();
        let div_tau = s.tau.divergence()?;
        let cross_u_rho = [0, 1, 2].map(|l| s.u.grad_inner(&grad_rho, l));
        let cross_tau_u = [0, 1, 2].map(|l| div_tau.grad_inner(&s.u, l));
        let [a0, a1, a2] = cross_u_rho;
        let [b0, b1, b2] = cross_tau_u;
        let (rho_l, rho_h) = self.split.split(&s.rho);
        let (u_l, u_h) = self.split.split(&s.u);
        let eta_l = self.split.low(&s.eta);
        let cross_high = [
            s.u.grad_inner(&rho_h.gradient(), 2)?,
            div_tau.grad_inner(&u_h, 2)?,
        ];
        let low =
            [1, 2, 3].map(|l| rho_l.grad_norm_sq(l) + u_l.grad_norm_sq(l) + eta_l.grad_norm_sq(l));
        let split3 = [
            rho_h.grad_norm_sq(3),
            u_h.grad_norm_sq(3),
            rho_l.grad_norm_sq(3),
            u_l.grad_norm_sq(3),
        ];
        let (density_term, density_sup) = self.density(&s.rho)?;
        let h3 = fields
            .iter()
            .map(|f| h_norm(f, 3).powi(2))
            .sum::<f64>()
            .sqrt();
        let div_u = s.u.divergence()?;
        let viscous = [
            (1..=4).map(|j| s.u.grad_norm_sq(j)).sum(),
            (0..=3).map(|j| div_u.grad_norm_sq(j)).sum(),
        ];
        Ok(EnergySample {
            t,
            norms,
            cross_u_rho: [a0?, a1?, a2?],
            cross_tau_u: [b0?, b1?, b2?],
            cross_high,
            density_term,
            density_sup,
            low,
            split3,
            h3,
            viscous,
        })
    }

    fn density(&self, rho: &SpectralField) -> Result<(f64, f64)> {
        let r = self.fft.inverse_real(&rho.comps[0]);
        let d3 = rho.nabla_m(3);
        let specs: Vec<&[_]> = d3.comps.iter().map(Vec::as_slice).collect();
        let phys = self.fft.inverse_real_many(&specs);
        let b = self.coeffs.beta();
        let (mut acc, mut sup) = (0.0, 0.0f64);
        for (p, &rp) in r.iter().enumerate() {
            if !(self.coeffs.r1() + b * rp > 0.0 && rp + self.coeffs.model.rho_bar > 0.0) {
                return Err(Error::Domain(format!(
                    "r1 + beta rho = {} is not positive",
                    self.coeffs.r1() + b * rp
                )));
            }
            let w = self.coeffs.density_weight(rp);
            sup = sup.max(w.abs());
            if w != 0.0 {
                acc += w * phys.iter().map(|c| c[p] * c[p]).sum::<f64>();
            }
        }
        Ok((acc * self.grid.cell_volume(), sup))
    }

    /// `sum_j w . ||grad^j (rho, u, eta, tau)||^2` over `js`.
    fn weighted(&self, e: &EnergySample, js: std::ops::RangeInclusive<usize>) -> f64 {
        let w = [1.0, 1.0, self.eta_weight(), self.tau_weight()];
        js.map(|j| (0..4).map(|f| w[f] * e.norms[f][j]).sum::<f64>())
            .sum()
    }

    /// Plain weighted norm sum `N_level`.
    pub fn plain(&self, level: u8, e: &EnergySample) -> Result<f64> {
        match level {
            1 => Ok(self.weighted(e, 1..=3)),
            2 => Ok(self.weighted(e, 2..=3)),
            3 => Ok(self.weighted(e, 3..=3)),
            _ => Err(Error::param(
                "level",
                format!("must be 1, 2 or 3, got {level}"),
            )),
        }
    }

    /// `H_level`.
    pub fn functional(&self, level: u8, e: &EnergySample) -> Result<f64> {
        let n = self.plain(level, e)?;
        let eps = &self.weights.eps;
        let (a, b) = (&e.cross_u_rho, &e.cross_tau_u);
        let cross = match level {
            1 => 2.0 * eps[2] * (a[1] + a[2]) + 2.0 * eps[3] * (b[1] + b[2]),
            2 => 2.0 * eps[4] * a[2] + 2.0 * eps[5] * b[2],
            _ => 2.0 * eps[6] * e.cross_high[0] + 2.0 * eps[7] * e.cross_high[1],
        };
        Ok(n + cross - e.density_term)
    }

    /// The full-norm functional J.
    pub fn functional_j(&self, e: &EnergySample) -> f64 {
        let eps = &self.weights.eps;
        0.5 * self.weighted(e, 0..=3)
            + eps[0] * e.cross_u_rho.iter().sum::<f64>()
            + eps[1] * e.cross_tau_u.iter().sum::<f64>()
            - 0.5 * e.density_term
    }

    /// Dissipation on the left of the level inequality minus the right side.
    pub fn dissipation(&self, level: u8, e: &EnergySample) -> Result<f64> {
        let c = &self.coeffs;
        let w = &self.weights;
        let [rho, u, eta, tau] = &e.norms;
        let r1 = c.r1();
        let bke = c.bke();
        let eta_c = if c.scaled.r2_degenerate() {
            0.0
        } else {
            c.r2() * c.eps() / c.be()
        };
        let tau_relax = c.r3() * c.relax() / bke;
        let tau_diff = c.r3() * c.eps() / bke;
        let cd = w.c_gen * w.delta;
        Ok(match level {
            1 => {
                w.eps[2] * r1 / 4.0 * (rho[2] + rho[3])
                    + w.eps[3] * bke / 4.0 * (u[2] + u[3])
                    + eta_c / 4.0 * (eta[2] + eta[3] + eta[4])
                    + tau_relax / 4.0 * (tau[1] + tau[2] + tau[3])
            }
            2 => {
                w.eps[4] * r1 / 4.0 * rho[3]
                    + w.eps[5] * bke / 4.0 * u[3]
                    + eta_c / 4.0 * (eta[3] + eta[4])
                    + tau_relax / 4.0 * (tau[2] + tau[3])
                    - cd * (u[2] + rho[2])
            }
            3 => {
                let [rho_h, u_h, rho_l, u_l] = e.split3;
                let (e7, e8) = (w.eps[6], w.eps[7]);
                e7 * r1 / 4.0 * rho_h
                    + e8 * bke / 4.0 * u_h
                    + eta_c / 2.0 * eta[4]
                    + tau_relax / 4.0 * tau[3]
                    + tau_diff / 8.0 * tau[4]
                    - w.c_gen * ((w.delta + e7) * rho_l + (w.delta + e7 + e8) * u_l)
                    - w.c_gen * (e7 + e8 * w.aux + w.delta) * eta[3]
            }
            _ => {
                return Err(Error::param(
                    "level",
                    format!("must be 1, 2 or 3, got {level}"),
                ))
            }
        })
    }

    /// Dissipation in the J inequality (which is stated for `dJ/dt`).
    pub fn dissipation_j(&self, e: &EnergySample) -> f64 {
        let c = &self.coeffs;
        let w = &self.weights;
        let [rho, u, eta, tau] = &e.norms;
        let eta_c = if c.scaled.r2_degenerate() {
            0.0
        } else {
            c.r2() * c.eps() / c.be()
        };
        let bke = c.bke();
        w.eps[0] * c.r1() / 4.0 * (rho[1] + rho[2] + rho[3])
            + w.eps[1] * bke / 4.0 * (u[1] + u[2] + u[3])
            + eta_c / 4.0 * (eta[1] + eta[2] + eta[3] + eta[4])
            + c.r3() * c.relax() / (4.0 * bke) * (tau[0] + tau[1] + tau[2] + tau[3])
            + c.r3() * c.eps() / (8.0 * bke) * (tau[1] + tau[2] + tau[3] + tau[4])
            + c.scaled.mu1 / 4.0 * e.viscous[0]
            + c.scaled.mu2 / 4.0 * e.viscous[1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::solver::InitSpec;
    use crate::spectral::{transform, Field, Valence};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn energy(grid: Grid, p: ModelParams) -> Energy {
        let co = Coeffs::new(p).unwrap();
        Energy::new(grid, co, FunctionalWeights::default_for(&co).unwrap()).unwrap()
    }

    #[test]
    fn sine_norms() {
        let grid = Grid::periodic_cube(16).unwrap();
        let f = Field::from_fn(grid, |x| x[0].sin());
        let s = transform(&f, &Fft3::for_grid(&grid)).unwrap();
        let v = (2.0 * PI).powi(3);
        assert!((sobolev_norm(&s, 0).powi(2) - v / 2.0).abs() < 1e-10);
        assert!((sobolev_norm(&s, 1) - sobolev_norm(&s, 0)).abs() < 1e-12);
        let mut c = SpectralField::zeros(grid, Valence::Scalar);
        c.comps[0][0] = Complex64::new(3.0, 0.0);
        assert_eq!(sobolev_norm(&c, 2), 0.0);
        let r = InitSpec {
            h3: 0.7,
            seed: 5,
            ..Default::default()
        }
        .generate(grid)
        .unwrap()
        .rho;
        let lhs = h_norm(&r, 1).powi(2);
        assert!((lhs - r.l2_norm_sq() - r.grad_norm_sq(1)).abs() < 1e-12 * lhs);
    }

    #[test]
    fn zero_state_is_zero() {
        let grid = Grid::cube(8, 4.0 * PI).unwrap();
        let e = energy(grid, ModelParams::default());
        let s = e.sample(0.0, &FieldState::zeros(grid)).unwrap();
        for l in 1..=3 {
            assert_eq!(e.functional(l, &s).unwrap(), 0.0);
        }
        assert_eq!(e.functional_j(&s), 0.0);
    }

    #[test]
    fn bare_functional_is_plain_norm() {
        let grid = Grid::cube(16, 4.0 * PI).unwrap();
        let mut e = energy(
            grid,
            ModelParams {
                gamma: 2.0,
                ..Default::default()
            },
        );
        e.weights.eps = [0.0; 8];
        let mut st = InitSpec {
            h3: 1e-2,
            seed: 9,
            ..Default::default()
        }
        .generate(grid)
        .unwrap();
        st.rho = SpectralField::zeros(grid, Valence::Scalar);
        let s = e.sample(0.0, &st).unwrap();
        for l in 1..=3 {
            assert_eq!(e.functional(l, &s).unwrap(), e.plain(l, &s).unwrap());
        }
    }

    #[test]
    fn cauchy_schwarz_audit() {
        let grid = Grid::cube(16, 4.0 * PI).unwrap();
        let e = energy(grid, ModelParams::default());
        let w = &e.weights.eps;
        let wt = e.tau_weight();
        for seed in 0..10 {
            let st = InitSpec {
                h3: 1e-2,
                seed,
                ..Default::default()
            }
            .generate(grid)
            .unwrap();
            let s = e.sample(0.0, &st).unwrap();
            let n = e.plain(1, &s).unwrap();
            let h = e.functional(1, &s).unwrap();
            let bound = (2.0 * w[2] + w[3] * (1.0 + 1.0 / wt) + s.density_sup) * n;
            assert!(
                (h - n).abs() <= bound,
                "{seed}: {} > {bound}",
                (h - n).abs()
            );
            for l in 1..=3 {
                let r = e.functional(l, &s).unwrap() / e.plain(l, &s).unwrap();
                assert!((0.5..=2.0).contains(&r), "{r}");
            }
        }
    }

    #[test]
    fn quadratic_homogeneity() {
        let grid = Grid::cube(16, 4.0 * PI).unwrap();
        let e = energy(grid, ModelParams::default());
        let mut st = InitSpec {
            h3: 1e-2,
            seed: 3,
            ..Default::default()
        }
        .generate(grid)
        .unwrap();
        st.rho = SpectralField::zeros(grid, Valence::Scalar);
        let s1 = e.sample(0.0, &st).unwrap();
        for c in [2.0, 10.0] {
            let s2 = e.sample(0.0, &st.scale(c)).unwrap();
            for l in 1..=3 {
                let (a, b) = (e.functional(l, &s1).unwrap(), e.functional(l, &s2).unwrap());
                assert!((b - c * c * a).abs() <= 1e-12 * b);
            }
        }
    }

    #[test]
    fn high_low_bookkeeping() {
        let grid = Grid::cube(16, 4.0 * PI).unwrap();
        let e = energy(grid, ModelParams::default());
        let st = InitSpec {
            h3: 1e-2,
            seed: 1,
            ..Default::default()
        }
        .generate(grid)
        .unwrap();
        let s = e.sample(0.0, &st).unwrap();
        let low = e.split.low(&st.rho).gradient();
        let full = st.u.grad_inner(&st.rho.gradient(), 2).unwrap();
        let via_low = full - st.u.grad_inner(&low, 2).unwrap();
        let h3 = e.functional(3, &s).unwrap();
        let alt = h3 - 2.0 * e.weights.eps[6] * (s.cross_high[0] - via_low);
        assert!((h3 - alt).abs() <= 1e-12 * h3.abs().max(1e-300) + 1e-24);
    }
}
