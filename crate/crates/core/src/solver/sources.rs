use num_complex::Complex64;

use super::ops::Ops;
use super::state::{FieldState, Modes, NCOMP};
use crate::error::{Error, Result};
use crate::model::{g_unchecked, h_unchecked, Coeffs, SYM_PAIRS};
use crate::spectral::SpectralField;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Nonlinear right-hand sides of the reformulated system in Fourier space,
/// dealiased. `s2` includes the viscous corrections when `mu` or `nu` is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceTerms {
    pub s1: SpectralField,
    pub s2: SpectralField,
    pub s3: SpectralField,
    pub s4: SpectralField,
}

pub fn compute_sources(state: &FieldState, c: &Coeffs) -> Result<SourceTerms> {
    let grid = state.grid();
    let ops = Ops::new(grid);
    let s = reformulated_sources(&ops, c, &state.pack())?;
    let st = FieldState::unpack(grid, &s);
    Ok(SourceTerms {
        s1: st.rho,
        s2: st.u,
        s3: st.eta,
        s4: st.tau,
    })
}

// Physical-space layout produced by `gather`.
const A: usize = 0;
const U: usize = 1;
const B: usize = 4;
const TEN: usize = 5;
const GU: usize = 11;
const GA: usize = 20;
const GB: usize = 23;
const DIVT: usize = 26;
const LAPU: usize = 29;
const GDIVU: usize = 32;

/// Physical values of the packed state and the derivatives the sources need.
fn gather(ops: &Ops, x: &Modes, viscous: bool) -> Vec<Vec<f64>> {
    let u: Vec<Vec<Complex64>> = x[1..4]
        .iter()
        .map(|c| c.iter().map(|v| I * v).collect())
        .collect();
    let mut specs: Vec<Vec<Complex64>> = Vec::with_capacity(35);
    specs.push(x[0].clone());
    specs.extend(u.iter().cloned());
    specs.push(x[4].clone());
    specs.extend(x[5..11].iter().cloned());
    for ui in &u {
        for l in 0..3 {
            specs.push(ops.deriv(ui, l));
        }
    }
    for l in 0..3 {
        specs.push(ops.deriv(&x[0], l));
    }
    for l in 0..3 {
        specs.push(ops.deriv(&x[4], l));
    }
    for i in 0..3 {
        let row = |j: usize| x[5 + crate::model::sym_index(i, j)].as_slice();
        specs.push(ops.div([row(0), row(1), row(2)]));
    }
    if viscous {
        for ui in &u {
            specs.push(ui.iter().zip(&ops.k2).map(|(v, k2)| -k2 * v).collect());
        }
        let divu = ops.div([&u[0], &u[1], &u[2]]);
        for l in 0..3 {
            specs.push(ops.deriv(&divu, l));
        }
    }
    let refs: Vec<&[Complex64]> = specs.iter().map(Vec::as_slice).collect();
    ops.phys(&refs)
}

/// Pointwise outputs: fluxes `a u` (3), `b u` (3), `u_l T_c` (18), a vector
/// term (3) and a tensor term (6).
struct Pointwise {
    out: Vec<Vec<f64>>,
}

impl Pointwise {
    fn new(len: usize) -> Self {
        Pointwise {
            out: vec![vec![0.0; len]; 33],
        }
    }
}

const FA: usize = 0;
const FB: usize = 3;
const FT: usize = 6;
const VEC: usize = 24;
const TPT: usize = 27;

/// Transforms the pointwise outputs and forms `flux * div(F) + pointwise`.
fn assemble(ops: &Ops, pw: Pointwise, flux: f64) -> Modes {
    let refs: Vec<&[f64]> = pw.out.iter().map(Vec::as_slice).collect();
    let s = ops.spec(&refs);
    let div3 = |base: usize| {
        let mut d = ops.div([&s[base], &s[base + 1], &s[base + 2]]);
        d.iter_mut().for_each(|v| *v *= flux);
        d
    };
    let mut out: Modes = Vec::with_capacity(NCOMP);
    out.push(div3(FA));
    for i in 0..3 {
        out.push(s[VEC + i].iter().map(|v| -I * v).collect());
    }
    out.push(div3(FB));
    for cidx in 0..6 {
        let mut d = div3(FT + 3 * cidx);
        for (v, w) in d.iter_mut().zip(&s[TPT + cidx]) {
            *v += w;
        }
        out.push(d);
    }
    out
}

fn check_positive(what: &str, total: f64) -> Result<()> {
    if total > 0.0 && total.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "total {what} {total} is not positive"
        )))
    }
}

/// `grad u T + T grad^T u` in storage order, with `(grad u)_{il} = d_l u_i`.
#[inline]
fn stretch(gu: &[[f64; 3]; 3], t: &[[f64; 3]; 3]) -> [f64; 6] {
    let mut out = [0.0; 6];
    for (n, &(i, j)) in SYM_PAIRS.iter().enumerate() {
        let mut s = 0.0;
        for l in 0..3 {
            s += gu[i][l] * t[l][j] + t[i][l] * gu[j][l];
        }
        out[n] = s;
    }
    out
}

#[inline]
fn sym_matrix(f: &[Vec<f64>], base: usize, p: usize) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for (n, &(i, j)) in SYM_PAIRS.iter().enumerate() {
        m[i][j] = f[base + n][p];
        m[j][i] = f[base + n][p];
    }
    m
}

/// Sources of the reformulated system on packed data, packed the same way.
pub(crate) fn reformulated_sources(ops: &Ops, c: &Coeffs, x: &Modes) -> Result<Modes> {
    let p = &c.model;
    let sp = &c.scaled;
    let viscous = p.is_viscous();
    let f = gather(ops, x, viscous);
    let beta = sp.beta;
    let coef_eta = p.k * (p.l - 1.0) + 2.0 * p.z * p.eta_bar;
    let mut pw = Pointwise::new(ops.len());
    for q in 0..ops.len() {
        let rho = f[A][q];
        let eta = f[B][q];
        check_positive("density", rho + p.rho_bar)?;
        check_positive("polymer density", eta + p.eta_bar)?;
        let h = h_unchecked(rho, sp, p);
        let g = g_unchecked(rho, sp, p);
        let u = [f[U][q], f[U + 1][q], f[U + 2][q]];
        let mut gu = [[0.0; 3]; 3];
        for i in 0..3 {
            for l in 0..3 {
                gu[i][l] = f[GU + 3 * i + l][q];
            }
        }
        let tau = sym_matrix(&f, TEN, q);
        for l in 0..3 {
            pw.out[FA + l][q] = rho * u[l];
            pw.out[FB + l][q] = eta * u[l];
            for n in 0..6 {
                pw.out[FT + 3 * n + l][q] = u[l] * f[TEN + n][q];
            }
        }
        let pol = 2.0 * p.z * eta / (beta * (rho + p.rho_bar));
        for i in 0..3 {
            let adv: f64 = (0..3).map(|l| u[l] * gu[i][l]).sum();
            let mut s2 =
                -beta * adv + h * f[GA + i][q] + g * (coef_eta * f[GB + i][q] - f[DIVT + i][q])
                    - pol * f[GB + i][q];
            if viscous {
                s2 -= beta * g * (p.mu * f[LAPU + i][q] + (p.mu + p.nu) * f[GDIVU + i][q]);
            }
            pw.out[VEC + i][q] = s2;
        }
        let st = stretch(&gu, &tau);
        for (n, &(i, j)) in SYM_PAIRS.iter().enumerate() {
            pw.out[TPT + n][q] = beta * st[n] + beta * p.k * eta * (gu[i][j] + gu[j][i]);
        }
    }
    Ok(assemble(ops, pw, -beta))
}

/// Nonlinear terms of the original system on packed perturbation data
/// `(rho - rho_bar, -i u_hat, eta - eta_bar, T - k eta_bar I)`, where `u` is
/// the physical velocity.
pub(crate) fn original_sources(ops: &Ops, c: &Coeffs, x: &Modes) -> Result<Modes> {
    let p = &c.model;
    let viscous = p.is_viscous();
    let f = gather(ops, x, viscous);
    let kl = p.k * p.l;
    let mut pw = Pointwise::new(ops.len());
    let base_p = p.dpressure(p.rho_bar) / p.rho_bar;
    let base_e = (kl + 2.0 * p.z * p.eta_bar) / p.rho_bar;
    for q in 0..ops.len() {
        let rho_p = f[A][q];
        let eta_p = f[B][q];
        let rho = p.rho_bar + rho_p;
        let eta = p.eta_bar + eta_p;
        check_positive("density", rho)?;
        check_positive("polymer density", eta)?;
        let u = [f[U][q], f[U + 1][q], f[U + 2][q]];
        let mut gu = [[0.0; 3]; 3];
        for i in 0..3 {
            for l in 0..3 {
                gu[i][l] = f[GU + 3 * i + l][q];
            }
        }
        let tp = sym_matrix(&f, TEN, q);
        for l in 0..3 {
            pw.out[FA + l][q] = rho_p * u[l];
            pw.out[FB + l][q] = eta_p * u[l];
            for n in 0..6 {
                pw.out[FT + 3 * n + l][q] = u[l] * f[TEN + n][q];
            }
        }
        let inv = 1.0 / rho - 1.0 / p.rho_bar;
        let dp = p.dpressure(rho) / rho - base_p;
        let de = (kl + 2.0 * p.z * eta) / rho - base_e;
        for i in 0..3 {
            let adv: f64 = (0..3).map(|l| u[l] * gu[i][l]).sum();
            let mut n = -adv - dp * f[GA + i][q] + inv * f[DIVT + i][q] - de * f[GB + i][q];
            if viscous {
                n += inv * (p.mu * f[LAPU + i][q] + (p.mu + p.nu) * f[GDIVU + i][q]);
            }
            pw.out[VEC + i][q] = n;
        }
        let st = stretch(&gu, &tp);
        for n in 0..6 {
            pw.out[TPT + n][q] = st[n];
        }
    }
    Ok(assemble(ops, pw, -1.0))
}

/// Mean of each source component; the divergence-form ones vanish exactly.
pub fn source_means(s: &SourceTerms) -> [f64; 2] {
    [s.s1.comps[0][0].norm(), s.s3.comps[0][0].norm()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::solver::InitSpec;
    use crate::spectral::{Grid, Valence};

    fn coeffs(p: ModelParams) -> Coeffs {
        Coeffs::new(p).unwrap()
    }

    fn state(seed: u64, h3: f64) -> FieldState {
        let grid = Grid::periodic_cube(16).unwrap();
        InitSpec {
            seed,
            h3,
            ..Default::default()
        }
        .generate(grid)
        .unwrap()
    }

    #[test]
    fn zero_state_has_zero_sources() {
        let c = coeffs(ModelParams::default());
        let s = compute_sources(&FieldState::zeros(Grid::periodic_cube(8).unwrap()), &c).unwrap();
        for f in [&s.s1, &s.s2, &s.s3, &s.s4] {
            assert!(f.comps.iter().flatten().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn divergence_sources_have_zero_mean() {
        let c = coeffs(ModelParams::default());
        let s = compute_sources(&state(3, 0.5), &c).unwrap();
        let [m1, m3] = source_means(&s);
        assert!(m1 < 1e-12 && m3 < 1e-12);
        assert_eq!(s.s4.valence, Valence::SymTensor);
    }

    #[test]
    fn velocity_free_state() {
        // With u = 0 only the pressure-like terms of S2 survive.
        let c = coeffs(ModelParams {
            gamma: 3.0,
            ..Default::default()
        });
        let mut st = state(5, 0.5);
        st.u = SpectralField::zeros(st.grid(), Valence::Vector);
        let s = compute_sources(&st, &c).unwrap();
        for f in [&s.s1, &s.s3, &s.s4] {
            assert!(f.comps.iter().flatten().all(|v| v.norm() < 1e-15));
        }
        assert!(s.s2.l2_norm_sq() > 0.0);
    }

    #[test]
    fn pure_velocity_state() {
        // rho = eta = tau = 0: S2 = -beta u.grad u and the stress source vanishes.
        let c = coeffs(ModelParams::default());
        let mut st = state(9, 0.5);
        let grid = st.grid();
        st.rho = SpectralField::zeros(grid, Valence::Scalar);
        st.eta = SpectralField::zeros(grid, Valence::Scalar);
        st.tau = SpectralField::zeros(grid, Valence::SymTensor);
        let s = compute_sources(&st, &c).unwrap();
        assert!(s.s1.comps[0].iter().all(|v| v.norm() < 1e-15));
        assert!(s.s4.comps.iter().flatten().all(|v| v.norm() < 1e-15));
        let ops = Ops::new(grid);
        let u = ops.phys(&st.u.comps.iter().map(Vec::as_slice).collect::<Vec<_>>());
        let gu: Vec<Vec<f64>> = (0..9)
            .map(|n| ops.fft.inverse_real(&ops.deriv(&st.u.comps[n / 3], n % 3)))
            .collect();
        for i in 0..3 {
            let adv: Vec<f64> = (0..grid.len())
                .map(|q| -c.beta() * (0..3).map(|l| u[l][q] * gu[3 * i + l][q]).sum::<f64>())
                .collect();
            let want = ops.spec(&[&adv]).remove(0);
            let diff = want
                .iter()
                .zip(&s.s2.comps[i])
                .fold(0.0f64, |a, (x, y)| a.max((x - y).norm()));
            assert!(diff < 1e-16);
        }
    }

    #[test]
    fn rejects_negative_density() {
        let c = coeffs(ModelParams::default());
        let mut st = state(1, 1.0);
        st.rho.comps[0][0] = Complex64::new(-2.0, 0.0);
        assert!(matches!(compute_sources(&st, &c), Err(Error::Domain(_))));
    }
}
