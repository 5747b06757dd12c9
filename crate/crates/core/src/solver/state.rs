use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Coeffs;
use crate::spectral::{inverse_transform, transform, Fft3, Field, Grid, SpectralField, Valence};

/// Number of scalar components of a packed state: `rho`, three velocity
/// components, `eta` and six stress components.
pub const NCOMP: usize = 11;

/// Fourier coefficients of all components, velocity stored as `-i u_hat`
/// so that the per-mode linear operator is real.
pub type Modes = Vec<Vec<Complex64>>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Perturbation variables `(rho', u', eta', tau)` of the reformulated system
/// in Fourier representation. `u` is the original velocity divided by `beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub rho: SpectralField,
    pub u: SpectralField,
    pub eta: SpectralField,
    pub tau: SpectralField,
}

impl FieldState {
    pub fn zeros(grid: Grid) -> Self {
        FieldState {
            rho: SpectralField::zeros(grid, Valence::Scalar),
            u: SpectralField::zeros(grid, Valence::Vector),
            eta: SpectralField::zeros(grid, Valence::Scalar),
            tau: SpectralField::zeros(grid, Valence::SymTensor),
        }
    }

    pub fn grid(&self) -> Grid {
        self.rho.grid
    }

    pub fn from_physical(
        rho: &Field,
        u: &Field,
        eta: &Field,
        tau: &Field,
        fft: &Fft3,
    ) -> Result<Self> {
        let want = [
            Valence::Scalar,
            Valence::Vector,
            Valence::Scalar,
            Valence::SymTensor,
        ];
        for (f, v) in [rho, u, eta, tau].iter().zip(want) {
            if f.valence != v {
                return Err(Error::GridMismatch(format!(
                    "expected {v:?}, got {:?}",
                    f.valence
                )));
            }
            f.grid.ensure_same(&rho.grid)?;
        }
        Ok(FieldState {
            rho: transform(rho, fft)?,
            u: transform(u, fft)?,
            eta: transform(eta, fft)?,
            tau: transform(tau, fft)?,
        })
    }

    pub fn to_physical(&self, fft: &Fft3) -> Result<[Field; 4]> {
        Ok([
            inverse_transform(&self.rho, fft)?,
            inverse_transform(&self.u, fft)?,
            inverse_transform(&self.eta, fft)?,
            inverse_transform(&self.tau, fft)?,
        ])
    }

    pub fn fields(&self) -> [&SpectralField; 4] {
        [&self.rho, &self.u, &self.eta, &self.tau]
    }

    pub fn scale(&self, s: f64) -> Self {
        FieldState {
            rho: self.rho.scale(s),
            u: self.u.scale(s),
            eta: self.eta.scale(s),
            tau: self.tau.scale(s),
        }
    }

    pub fn sub(&self, o: &FieldState) -> Result<Self> {
        Ok(FieldState {
            rho: self.rho.sub(&o.rho)?,
            u: self.u.sub(&o.u)?,
            eta: self.eta.sub(&o.eta)?,
            tau: self.tau.sub(&o.tau)?,
        })
    }

    /// `sum_f |box| sum_k w(|k|) |f_k|^2` over all four fields.
    pub fn weighted_norm_sq(&self, w: impl Fn(f64) -> f64 + Copy) -> f64 {
        self.fields().iter().map(|f| f.weighted_norm_sq(w)).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.weighted_norm_sq(|_| 1.0).sqrt()
    }

    /// `(sum_{j <= s} ||grad^j (rho, u, eta, tau)||^2)^{1/2}`.
    pub fn h_norm(&self, s: u32) -> f64 {
        self.weighted_norm_sq(|r| (0..=s).map(|j| r.powi(2 * j as i32)).sum())
            .sqrt()
    }

    pub(crate) fn pack(&self) -> Modes {
        let mut out = Vec::with_capacity(NCOMP);
        out.push(self.rho.comps[0].clone());
        for c in &self.u.comps {
            out.push(c.iter().map(|v| -I * v).collect());
        }
        out.push(self.eta.comps[0].clone());
        out.extend(self.tau.comps.iter().cloned());
        out
    }

    pub(crate) fn unpack(grid: Grid, x: &Modes) -> Self {
        FieldState {
            rho: SpectralField::scalar(grid, x[0].clone()),
            u: SpectralField {
                grid,
                valence: Valence::Vector,
                comps: x[1..4]
                    .iter()
                    .map(|c| c.iter().map(|v| I * v).collect())
                    .collect(),
            },
            eta: SpectralField::scalar(grid, x[4].clone()),
            tau: SpectralField {
                grid,
                valence: Valence::SymTensor,
                comps: x[5..11].to_vec(),
            },
        }
    }
}

/// Total fields `(rho, u, eta, T)` of the original system; `u` is the
/// physical velocity.
#[derive(Clone, Debug, PartialEq)]
pub struct OriginalState {
    pub rho: SpectralField,
    pub u: SpectralField,
    pub eta: SpectralField,
    pub t: SpectralField,
}

impl OriginalState {
    /// Maps reformulated perturbation data to total fields:
    /// `rho = rho_bar + rho'`, `u = beta u'`, `eta = eta_bar + eta'`,
    /// `T = tau + k eta I`.
    pub fn from_reformulated(s: &FieldState, c: &Coeffs) -> Self {
        let p = &c.model;
        let mut rho = s.rho.clone();
        rho.comps[0][0] += p.rho_bar;
        let mut eta = s.eta.clone();
        eta.comps[0][0] += p.eta_bar;
        let mut t = s.tau.clone();
        for d in 0..3 {
            for (tv, ev) in t.comps[d].iter_mut().zip(&eta.comps[0]) {
                *tv += p.k * ev;
            }
        }
        OriginalState {
            rho,
            u: s.u.scale(c.beta()),
            eta,
            t,
        }
    }

    pub(crate) fn pack(&self, c: &Coeffs) -> Modes {
        let p = &c.model;
        let mut out = Vec::with_capacity(NCOMP);
        let mut rho = self.rho.comps[0].clone();
        rho[0] -= p.rho_bar;
        out.push(rho);
        for comp in &self.u.comps {
            out.push(comp.iter().map(|v| -I * v).collect());
        }
        let mut eta = self.eta.comps[0].clone();
        eta[0] -= p.eta_bar;
        out.push(eta);
        for (n, comp) in self.t.comps.iter().enumerate() {
            let mut v = comp.clone();
            if n < 3 {
                v[0] -= p.k * p.eta_bar;
            }
            out.push(v);
        }
        out
    }

    pub(crate) fn unpack(grid: Grid, x: &Modes, c: &Coeffs) -> Self {
        let p = &c.model;
        let mut rho = x[0].clone();
        rho[0] += p.rho_bar;
        let mut eta = x[4].clone();
        eta[0] += p.eta_bar;
        let mut t = x[5..11].to_vec();
        for v in t.iter_mut().take(3) {
            v[0] += p.k * p.eta_bar;
        }
        OriginalState {
            rho: SpectralField::scalar(grid, rho),
            u: SpectralField {
                grid,
                valence: Valence::Vector,
                comps: x[1..4]
                    .iter()
                    .map(|c| c.iter().map(|v| I * v).collect())
                    .collect(),
            },
            eta: SpectralField::scalar(grid, eta),
            t: SpectralField {
                grid,
                valence: Valence::SymTensor,
                comps: t,
            },
        }
    }
}

/// Largest pointwise deviation between an original-system state and the
/// image of a reformulated state, over all fields; the stress part is
/// `|T - (tau + k eta I)|` with total `eta`.
/// Writes the four physical fields of `s` at time `t` as consecutive
/// binary field records.
pub fn write_state<W: std::io::Write>(w: &mut W, s: &FieldState, t: f64) -> Result<()> {
    let fft = Fft3::for_grid(&s.grid());
    for f in s.to_physical(&fft)? {
        crate::spectral::io::write_field(w, &f, t)?;
    }
    Ok(())
}

/// Reads a state written by [`write_state`].
pub fn read_state<R: std::io::Read>(r: &mut R) -> Result<(FieldState, f64)> {
    let (rho, t) = crate::spectral::io::read_field(r)?;
    let mut rest = Vec::with_capacity(3);
    for _ in 0..3 {
        let (f, tf) = crate::spectral::io::read_field(r)?;
        if tf != t {
            return Err(Error::Format(format!("record times differ: {t} vs {tf}")));
        }
        rest.push(f);
    }
    let fft = Fft3::for_grid(&rho.grid);
    let s = FieldState::from_physical(&rho, &rest[0], &rest[1], &rest[2], &fft)
        .map_err(|e| Error::Format(e.to_string()))?;
    Ok((s, t))
}

pub fn equivalence_defect(
    s: &FieldState,
    o: &OriginalState,
    c: &Coeffs,
    fft: &Fft3,
) -> Result<f64> {
    let image = OriginalState::from_reformulated(s, c);
    let mut worst: f64 = 0.0;
    for (a, b) in [
        (&o.rho, &image.rho),
        (&o.u, &image.u),
        (&o.eta, &image.eta),
        (&o.t, &image.t),
    ] {
        worst = worst.max(inverse_transform(&a.sub(b)?, fft)?.max_abs());
    }
    Ok(worst)
}

/// Band-limited random initial data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitSpec {
    pub seed: u64,
    /// `H^3` norm of the fluctuating part of `(rho', u', eta', tau)`.
    pub h3: f64,
    /// Largest integer mode number per axis.
    pub kmax: u32,
    /// Spatial means of `rho'` and `eta'`.
    pub rho_mean: f64,
    pub eta_mean: f64,
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec {
            seed: 0,
            h3: 1e-3,
            kmax: 3,
            rho_mean: 0.0,
            eta_mean: 0.0,
        }
    }
}

impl InitSpec {
    pub fn generate(&self, grid: Grid) -> Result<FieldState> {
        if !(self.h3 >= 0.0 && self.h3.is_finite()) {
            return Err(Error::param(
                "h3",
                format!("must be finite and >= 0, got {}", self.h3),
            ));
        }
        if self.kmax == 0 {
            return Err(Error::param("kmax", "must be >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let kmax = self.kmax as i64;
        let in_band = |p: usize| {
            grid.is_resolved(p)
                && grid
                    .unflatten(p)
                    .iter()
                    .all(|&i| grid.signed_mode(i).abs() <= kmax)
        };
        let mut x: Modes = vec![vec![Complex64::default(); grid.len()]; NCOMP];
        for (c, comp) in x.iter_mut().enumerate() {
            let sign = if (1..4).contains(&c) { -1.0 } else { 1.0 };
            for p in 1..grid.len() {
                let q = grid.conj_index(p);
                if q <= p || !in_band(p) {
                    continue;
                }
                let env = 1.0 / (1.0 + grid.xi_norm(p).powi(2));
                let v =
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * env;
                comp[p] = v;
                comp[q] = sign * v.conj();
            }
        }
        let mut state = FieldState::unpack(grid, &x);
        let norm = state.h_norm(3);
        if norm > 0.0 {
            state = state.scale(self.h3 / norm);
        }
        state.rho.comps[0][0] = Complex64::new(self.rho_mean, 0.0);
        state.eta.comps[0][0] = Complex64::new(self.eta_mean, 0.0);
        Ok(state)
    }
}

/// Single Fourier mode `m` with real amplitudes `(rho, u, eta, tau)`
/// multiplying `cos(k.x)`, plus its conjugate.
pub fn single_mode(grid: Grid, m: [i64; 3], amp: [f64; NCOMP]) -> Result<FieldState> {
    let n = grid.n() as i64;
    let idx = |v: i64| ((v % n + n) % n) as usize;
    let p = grid.index(idx(m[0]), idx(m[1]), idx(m[2]));
    if !grid.is_resolved(p) {
        return Err(Error::Domain(format!("mode {m:?} is not resolved")));
    }
    let q = grid.conj_index(p);
    let mut x: Modes = vec![vec![Complex64::default(); grid.len()]; NCOMP];
    for (c, a) in amp.iter().enumerate() {
        let v = if (1..4).contains(&c) {
            -I * a
        } else {
            Complex64::new(*a, 0.0)
        };
        let half = if p == q { v } else { 0.5 * v };
        x[c][p] += half;
        if p != q {
            x[c][q] += half.conj() * if (1..4).contains(&c) { -1.0 } else { 1.0 };
        }
    }
    Ok(FieldState::unpack(grid, &x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_round_trip() {
        let grid = Grid::periodic_cube(8).unwrap();
        let s = InitSpec {
            h3: 0.3,
            ..Default::default()
        }
        .generate(grid)
        .unwrap();
        let back = FieldState::unpack(grid, &s.pack());
        assert!(s.u.max_abs_diff(&back.u) < 1e-16 && s.tau == back.tau);
        let c = Coeffs::new(Default::default()).unwrap();
        let o = OriginalState::from_reformulated(&s, &c);
        let o2 = OriginalState::unpack(grid, &o.pack(&c), &c);
        assert!(o.t.max_abs_diff(&o2.t) < 1e-15);
    }

    #[test]
    fn generated_data_is_real_and_normalized() {
        let grid = Grid::periodic_cube(16).unwrap();
        let spec = InitSpec {
            h3: 1e-3,
            rho_mean: 0.01,
            seed: 7,
            ..Default::default()
        };
        let s = spec.generate(grid).unwrap();
        for f in s.fields() {
            assert!(f.hermitian_defect() < 1e-18);
        }
        assert_eq!(s.rho.comps[0][0].re, 0.01);
        let mut fluct = s.clone();
        fluct.rho.comps[0][0] = Complex64::default();
        assert!((fluct.h_norm(3) - 1e-3).abs() < 1e-15);
        assert_eq!(spec.generate(grid).unwrap(), s);
    }

    #[test]
    fn state_file_round_trip() {
        let grid = Grid::periodic_cube(8).unwrap();
        let s = InitSpec {
            h3: 0.3,
            ..Default::default()
        }
        .generate(grid)
        .unwrap();
        let mut buf = Vec::new();
        write_state(&mut buf, &s, 1.5).unwrap();
        let (back, t) = read_state(&mut buf.as_slice()).unwrap();
        assert_eq!(t, 1.5);
        assert!(s.sub(&back).unwrap().l2_norm() < 1e-14);
        assert!(read_state(&mut &buf[..buf.len() - 8]).is_err());
    }

    #[test]
    fn single_mode_is_cosine() {
        let grid = Grid::periodic_cube(8).unwrap();
        let mut amp = [0.0; NCOMP];
        amp[0] = 2.0;
        amp[2] = 1.0;
        let s = single_mode(grid, [1, 0, 0], amp).unwrap();
        let fft = Fft3::for_grid(&grid);
        let [rho, u, ..] = s.to_physical(&fft).unwrap();
        for p in 0..grid.len() {
            let x = grid.point(p)[0];
            assert!((rho.comps[0][p] - 2.0 * x.cos()).abs() < 1e-14);
            assert!((u.comps[1][p] - x.cos()).abs() < 1e-14);
        }
    }
}
