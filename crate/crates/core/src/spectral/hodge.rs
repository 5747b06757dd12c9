use num_complex::Complex64;

use super::field::{antisym_index, SpectralField, Valence};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `Lambda^s f` with symbol `|xi|^s`.
///
/// For `s < 0` the zero mode is set to 0. The returned flag is true when
/// that convention discarded a nonzero mean.
pub fn lambda_op(f: &SpectralField, s: f64) -> (SpectralField, bool) {
    let g = f.grid;
    let mut out = f.clone();
    let mut dropped = false;
    for p in 0..g.len() {
        let r = g.xi_norm(p);
        let w = if r == 0.0 {
            if s < 0.0 {
                dropped |= out.comps.iter().any(|c| c[p] != Complex64::default());
                0.0
            } else if s == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            r.powf(s)
        };
        for c in out.comps.iter_mut() {
            c[p] *= w;
        }
    }
    if dropped {
        log::warn!("Lambda^{s} applied to a field with nonzero mean; zero mode set to 0");
    }
    (out, dropped)
}

/// Compressible and incompressible parts of a velocity field.
#[derive(Clone, Debug, PartialEq)]
pub struct Hodge {
    /// `d = Lambda^{-1} div u`.
    pub d: SpectralField,
    /// `Pu = Lambda^{-1} curl u`, antisymmetric with `(curl u)_{ij} = d_j u_i - d_i u_j`.
    pub pu: SpectralField,
}

pub fn hodge(u: &SpectralField) -> Result<Hodge> {
    if u.valence != Valence::Vector {
        return Err(Error::GridMismatch("hodge needs a vector field".into()));
    }
    let g = u.grid;
    let mut d = SpectralField::zeros(g, Valence::Scalar);
    let mut pu = SpectralField::zeros(g, Valence::Antisym);
    for p in 0..g.len() {
        let r = g.xi_norm(p);
        if r == 0.0 {
            continue;
        }
        let xi = g.xi(p);
        let v = [u.comps[0][p], u.comps[1][p], u.comps[2][p]];
        d.comps[0][p] = I * (xi[0] * v[0] + xi[1] * v[1] + xi[2] * v[2]) / r;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            pu.comps[antisym_index(i, j)][p] = I * (xi[j] * v[i] - xi[i] * v[j]) / r;
        }
    }
    Ok(Hodge { d, pu })
}

/// The two parts `-Lambda^{-1} grad d` and `-Lambda^{-1} div Pu`; their sum is `u`
/// on every nonzero mode.
pub fn hodge_parts(h: &Hodge) -> Result<(SpectralField, SpectralField)> {
    let (grad_d, _) = lambda_op(&h.d.gradient(), -1.0);
    let (div_p, _) = lambda_op(&h.pu.divergence()?, -1.0);
    Ok((grad_d.scale(-1.0), div_p.scale(-1.0)))
}

pub fn reconstruct(h: &Hodge) -> Result<SpectralField> {
    let (a, b) = hodge_parts(h)?;
    a.add(&b)
}
