use nalgebra::{Matrix2, Matrix4, SMatrix};
use num_complex::Complex64;

use super::blocks::{SymbolMatrix2, SymbolMatrix4};
use super::modes::{
    transform2, transform4, CorrectedModes2, CorrectedModes4, ModeState2, ModeState4,
};
use crate::error::{Error, Result};
use crate::model::Coeffs;

/// Weight matrix of the compressible functional on `(a, o, z, q)`:
/// `|a|^2 + |o|^2 + w_z |z|^2 + |q|^2 - 2 eps_tilde r Re(conj(a) o)`.
pub fn weight4(r: f64, eps_tilde: f64, c: &Coeffs) -> Matrix4<f64> {
    let mut w = Matrix4::identity();
    w[(0, 1)] = -eps_tilde * r;
    w[(1, 0)] = -eps_tilde * r;
    w[(2, 2)] = c.eta_weight();
    w
}

pub fn lyapunov_value(m: &CorrectedModes4, r: f64, eps_tilde: f64, c: &Coeffs) -> f64 {
    hermitian_form(&weight4(r, eps_tilde, c), &m.as_vector())
}

pub fn lyapunov_value2(m: &CorrectedModes2) -> f64 {
    m.v.norm_sqr() + m.w.norm_sqr()
}

fn hermitian_form<const N: usize>(q: &SMatrix<f64, N, N>, x: &SMatrix<Complex64, N, 1>) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        for j in 0..N {
            acc += q[(i, j)] * (x[i].conj() * x[j]).re;
        }
    }
    acc
}

/// Quadratic forms `(Q, S)` on raw modes with `L = X^H Q X` and
/// `dL/dt = -X^H S X` along `X_t + M X = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate<const N: usize> {
    pub r: f64,
    pub q: SMatrix<f64, N, N>,
    pub s: SMatrix<f64, N, N>,
}

pub type Certificate4 = Certificate<4>;
pub type Certificate2 = Certificate<2>;

impl<const N: usize> Certificate<N> {
    fn from_parts(
        r: f64,
        t: SMatrix<f64, N, N>,
        w: SMatrix<f64, N, N>,
        m: SMatrix<f64, N, N>,
    ) -> Self {
        let q = t.transpose() * w * t;
        let s = m.transpose() * q + q * m;
        Certificate { r, q, s }
    }

    pub fn value(&self, x: &SMatrix<Complex64, N, 1>) -> f64 {
        hermitian_form(&self.q, x)
    }

    /// Exact `dL/dt` at state `x`.
    pub fn rate(&self, x: &SMatrix<Complex64, N, 1>) -> f64 {
        -hermitian_form(&self.s, x)
    }

    /// Largest `kappa` with `S >= kappa r^2 Q`; `None` if `Q` is not positive definite.
    pub fn kappa(&self) -> Option<f64> {
        let chol = self.q.cholesky()?;
        let l = chol.l();
        let linv = l.try_inverse()?;
        let k = linv * self.s * linv.transpose();
        let k = (k + k.transpose()) * 0.5;
        let min = super::expm::dyn_of(&k).symmetric_eigenvalues().min();
        if self.r > 0.0 {
            Some(min / (self.r * self.r))
        } else {
            Some(if min >= 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            })
        }
    }
}

pub fn certificate4(r: f64, eps_tilde: f64, c: &Coeffs) -> Result<Certificate4> {
    if eps_tilde * r > 1.0 {
        return Err(Error::Domain(format!(
            "r = {r} outside the equivalence range 1/eps_tilde"
        )));
    }
    let t = transform4(r, c)?;
    Ok(Certificate::from_parts(
        r,
        t,
        weight4(r, eps_tilde, c),
        SymbolMatrix4::new(r, c).m,
    ))
}

pub fn certificate2(r: f64, c: &Coeffs) -> Certificate2 {
    Certificate::from_parts(
        r,
        transform2(c),
        Matrix2::identity(),
        SymbolMatrix2::new(r, c).m,
    )
}

/// `dL/dt` of the compressible functional at raw state `x`.
pub fn lyapunov_rate(x: &ModeState4, r: f64, eps_tilde: f64, c: &Coeffs) -> Result<f64> {
    Ok(certificate4(r, eps_tilde, c)?.rate(x))
}

pub fn lyapunov_rate2(x: &ModeState2, r: f64, c: &Coeffs) -> f64 {
    certificate2(r, c).rate(x)
}

/// Coefficient `K` of `r^2` in the damping bound of the incompressible block:
/// the bound `A0/(2 lambda) + K r^2 >= A0/(4 lambda)` is required.
pub fn two_block_coefficient(c: &Coeffs) -> f64 {
    let s = c.inv_relax() * c.r3();
    let e = c.eps() - s * c.bke();
    e - c.relax() / c.r3() * c.bke() - s / c.bke() * e * e
}

/// Whether `r` satisfies the damping bound of the incompressible block and `r <= 1`.
pub fn two_block_admissible(r: f64, c: &Coeffs) -> bool {
    r <= 1.0 && c.relax() + two_block_coefficient(c) * r * r >= 0.5 * c.relax()
}
