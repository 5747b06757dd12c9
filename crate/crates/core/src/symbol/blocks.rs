use nalgebra::{Matrix2, Matrix4, SMatrix, Vector3};
use num_complex::Complex64;

use crate::model::Coeffs;

pub type CMatrix8 = SMatrix<Complex64, 8, 8>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Symbol of the compressible block on `(rho, d, eta, q)` with `X_t + M X = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolMatrix4 {
    pub r: f64,
    pub m: Matrix4<f64>,
}

/// Symbol of the incompressible block on `(Pu, P div tau)` along one transverse direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolMatrix2 {
    pub r: f64,
    pub m: Matrix2<f64>,
}

/// Full symbol on `(rho, u_1..u_3, eta, w_1..w_3)` with `w = div tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FullSymbol8 {
    pub xi: [f64; 3],
    pub m: CMatrix8,
}

impl SymbolMatrix4 {
    pub fn new(r: f64, c: &Coeffs) -> Self {
        let (r1, r2, r3) = (c.r1(), c.r2(), c.r3());
        let damp = c.relax() + c.eps() * r * r;
        #[rustfmt::skip]
        let m = Matrix4::new(
            0.0, r1 * r, 0.0, 0.0,
            -r1 * r, 0.0, -r2 * r, -r3,
            0.0, c.be() * r, c.eps() * r * r, 0.0,
            0.0, 2.0 * c.bke() * r * r, 0.0, damp,
        );
        SymbolMatrix4 { r, m }
    }
}

impl SymbolMatrix2 {
    pub fn new(r: f64, c: &Coeffs) -> Self {
        let damp = c.relax() + c.eps() * r * r;
        let m = Matrix2::new(0.0, -c.r3(), c.bke() * r * r, damp);
        SymbolMatrix2 { r, m }
    }

    /// Eigenvalues ordered by real part (complex pairs share it).
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let tr = self.m.trace();
        let det = self.m.determinant();
        let disc = Complex64::new(tr * tr / 4.0 - det, 0.0).sqrt();
        let half = Complex64::new(tr / 2.0, 0.0);
        if disc.im == 0.0 {
            // Stable form for the small root.
            let big = half + disc;
            let small = if big.re != 0.0 {
                Complex64::new(det, 0.0) / big
            } else {
                half - disc
            };
            [small, big]
        } else {
            [half - disc, half + disc]
        }
    }
}

pub fn build_symbol(r: f64, c: &Coeffs) -> (SymbolMatrix4, SymbolMatrix2) {
    (SymbolMatrix4::new(r, c), SymbolMatrix2::new(r, c))
}

pub fn build_full_symbol(xi: [f64; 3], c: &Coeffs) -> FullSymbol8 {
    let r2 = xi.iter().map(|x| x * x).sum::<f64>();
    let damp = c.relax() + c.eps() * r2;
    let mut m = CMatrix8::zeros();
    for j in 0..3 {
        m[(0, 1 + j)] = I * c.r1() * xi[j];
        m[(1 + j, 0)] = I * c.r1() * xi[j];
        m[(1 + j, 4)] = I * c.r2() * xi[j];
        m[(1 + j, 5 + j)] = Complex64::new(-c.r3(), 0.0);
        m[(4, 1 + j)] = I * c.be() * xi[j];
        m[(5 + j, 5 + j)] = Complex64::new(damp, 0.0);
        for l in 0..3 {
            let delta = if j == l { r2 } else { 0.0 };
            m[(5 + j, 1 + l)] = Complex64::new(c.bke() * (delta + xi[j] * xi[l]), 0.0);
        }
    }
    m[(4, 4)] = Complex64::new(c.eps() * r2, 0.0);
    FullSymbol8 { xi, m }
}

/// Unit direction of `xi` and an orthonormal completion `(e1, e2)`.
/// At `xi = 0` the direction is taken along the third axis.
pub fn frame(xi: [f64; 3]) -> [Vector3<f64>; 3] {
    let v = Vector3::from(xi);
    let n = v.norm();
    let k = if n > 0.0 { v / n } else { Vector3::z() };
    let axis = (0..3)
        .min_by(|&a, &b| k[a].abs().total_cmp(&k[b].abs()))
        .unwrap_or(0);
    let e1 = k.cross(&Vector3::ith(axis, 1.0)).normalize();
    let e2 = k.cross(&e1);
    [k, e1, e2]
}

/// Unitary change of basis `X = P Y` from `Y = (rho, d, eta, q, v1, w1, v2, w2)`,
/// where `d = i xi_hat . u`, `q = i xi_hat . w` and `v_a = e_a . u`, `w_a = e_a . w`.
pub fn hodge_basis(xi: [f64; 3]) -> CMatrix8 {
    let [k, e1, e2] = frame(xi);
    let mut p = CMatrix8::zeros();
    let one = Complex64::new(1.0, 0.0);
    p[(0, 0)] = one;
    p[(4, 2)] = one;
    for j in 0..3 {
        p[(1 + j, 1)] = -I * k[j];
        p[(5 + j, 3)] = -I * k[j];
        p[(1 + j, 4)] = e1[j].into();
        p[(5 + j, 5)] = e1[j].into();
        p[(1 + j, 6)] = e2[j].into();
        p[(5 + j, 7)] = e2[j].into();
    }
    p
}

/// `blockdiag(M4, M2, M2)` in the ordering of [`hodge_basis`].
pub fn block_form(r: f64, c: &Coeffs) -> CMatrix8 {
    let (m4, m2) = build_symbol(r, c);
    let mut b = CMatrix8::zeros();
    for i in 0..4 {
        for j in 0..4 {
            b[(i, j)] = m4.m[(i, j)].into();
        }
    }
    for blk in [4, 6] {
        for i in 0..2 {
            for j in 0..2 {
                b[(blk + i, blk + j)] = m2.m[(i, j)].into();
            }
        }
    }
    b
}

/// Max-entry distance between `P^H A P` and the block form.
pub fn block_defect(xi: [f64; 3], c: &Coeffs) -> f64 {
    let p = hodge_basis(xi);
    let a = build_full_symbol(xi, c).m;
    let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let d = p.adjoint() * a * p - block_form(r, c);
    d.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use nalgebra::Complex;

    fn coeffs() -> Coeffs {
        Coeffs::new(ModelParams::default()).unwrap()
    }

    #[test]
    fn zero_radius_spectrum() {
        let (m4, _) = build_symbol(0.0, &coeffs());
        let mut ev: Vec<f64> =
            m4.m.complex_eigenvalues()
                .iter()
                .map(|z: &Complex<f64>| z.re)
                .collect();
        ev.sort_by(f64::total_cmp);
        assert!(ev[..3].iter().all(|e| e.abs() < 1e-14));
        assert!((ev[3] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_block_examples() {
        let c = coeffs();
        let m2 = SymbolMatrix2::new(1.0, &c);
        assert!((m2.m[(0, 1)] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((m2.m[(1, 0)] - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!((m2.m[(1, 1)] - 2.0).abs() < 1e-15);
        let ev = m2.eigenvalues();
        assert!((ev[0] - 1.0).norm() < 1e-7 && (ev[1] - 1.0).norm() < 1e-7);
        let ev = SymbolMatrix2::new(0.1, &c).eigenvalues();
        assert!((ev[0].re - 0.01).abs() < 1e-14 && (ev[1].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hodge_basis_is_unitary() {
        let p = hodge_basis([0.3, -0.2, 0.9]);
        let e = p.adjoint() * p - CMatrix8::identity();
        assert!(e.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn full_symbol_block_diagonalizes() {
        let c = coeffs();
        for xi in [
            [0.0, 0.0, 0.0],
            [0.1, 0.0, 0.0],
            [0.3, -0.4, 0.2],
            [0.0, 2.0, -1.0],
        ] {
            assert!(block_defect(xi, &c) < 1e-12, "{xi:?}");
        }
    }
}
