use nalgebra::{DMatrix, SMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Disagreement between the Pade and eigenvector routes that aborts.
pub const EXPM_TOL: f64 = 1e-9;
/// Eigenvector condition number above which the cross-check is skipped.
pub const MAX_EIGEN_COND: f64 = 1e5;

/// `exp(-t M)` by scaling and squaring with a Pade approximant.
pub fn semigroup_pade<const N: usize>(m: &SMatrix<f64, N, N>, t: f64) -> SMatrix<f64, N, N> {
    if t == 0.0 {
        return SMatrix::identity();
    }
    let e = dyn_of(m).scale(-t).exp();
    SMatrix::from_column_slice(e.as_slice())
}

pub(crate) fn dyn_of<const N: usize>(m: &SMatrix<f64, N, N>) -> DMatrix<f64> {
    DMatrix::from_column_slice(N, N, m.as_slice())
}

/// `exp(-t M)` from a numerical eigendecomposition, together with the
/// condition number of the eigenvector matrix. `None` if no basis was found.
pub fn semigroup_eigen(m: &DMatrix<f64>, t: f64) -> Option<(DMatrix<f64>, f64)> {
    let n = m.nrows();
    let mc: DMatrix<Complex64> = m.map(Complex64::from);
    let eig = m.complex_eigenvalues();
    let mut v = DMatrix::<Complex64>::zeros(n, n);
    for (k, &lam) in eig.iter().enumerate() {
        let shifted = &mc - DMatrix::<Complex64>::identity(n, n) * lam;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t?;
        let (idx, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))?;
        let col = vt.row(idx).adjoint();
        v.set_column(k, &col);
    }
    let sv = v.clone().svd(false, false).singular_values;
    let smax = sv.max();
    let smin = sv.min();
    if smin <= 0.0 || !smin.is_finite() {
        return None;
    }
    let cond = smax / smin;
    let vinv = v.clone().try_inverse()?;
    let d = DMatrix::from_diagonal(&eig.map(|l| (-t * l).exp()));
    let e = v * d * vinv;
    Some((e.map(|z| z.re), cond))
}

/// `exp(-t M)` by Pade, cross-checked against the eigenvector route when the
/// eigenbasis is well conditioned. Disagreement above [`EXPM_TOL`] relative to
/// `max(1, |exp(-tM)|)` is an error.
pub fn semigroup<const N: usize>(m: &SMatrix<f64, N, N>, t: f64) -> Result<SMatrix<f64, N, N>> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("semigroup needs t >= 0, got {t}")));
    }
    let e = semigroup_pade(m, t);
    if let Some((alt, cond)) = semigroup_eigen(&dyn_of(m), t) {
        if cond <= MAX_EIGEN_COND {
            let scale = e.norm().max(1.0);
            let diff = e
                .iter()
                .zip(alt.iter())
                .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
                / scale;
            if diff > EXPM_TOL {
                return Err(Error::ExpmDisagreement(diff));
            }
        }
    }
    Ok(e)
}

/// Spectral norm.
pub fn op_norm<const N: usize>(m: &SMatrix<f64, N, N>) -> f64 {
    dyn_of(m).singular_values().max()
}

/// Classical RK4 for `X' = -M X` with fixed step; test oracle.
pub fn rk4_flow<const N: usize>(
    m: &SMatrix<f64, N, N>,
    x0: SMatrix<f64, N, 1>,
    t: f64,
    h: f64,
) -> SMatrix<f64, N, 1> {
    let steps = (t / h).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let f = |x: &SMatrix<f64, N, 1>| -(m * x);
    let mut x = x0;
    for _ in 0..steps {
        let k1 = f(&x);
        let k2 = f(&(x + k1 * (h / 2.0)));
        let k3 = f(&(x + k2 * (h / 2.0)));
        let k4 = f(&(x + k3 * h));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    x
}
