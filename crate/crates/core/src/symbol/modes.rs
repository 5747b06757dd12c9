use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::Coeffs;

/// Per-frequency state `(rho, d, eta, q)` of the compressible block.
pub type ModeState4 = Vector4<Complex64>;
/// Per-frequency state `(Pu, P div tau)` along one transverse direction.
pub type ModeState2 = Vector2<Complex64>;

/// Denominator `A0/(2 lambda) + (eps - 2 beta k eta (2 lambda/A0) r3) r^2` of `A1`.
pub fn a1_denominator(r: f64, c: &Coeffs) -> f64 {
    c.relax() + (c.eps() - 2.0 * c.bke() * c.inv_relax() * c.r3()) * r * r
}

pub fn a1(r: f64, c: &Coeffs) -> Result<f64> {
    let denom = a1_denominator(r, c);
    if denom > 0.0 {
        Ok(1.0 / denom)
    } else {
        Err(Error::DegenerateDenominator { r, denom })
    }
}

pub fn a2(r: f64, c: &Coeffs) -> Result<f64> {
    let a1 = a1(r, c)?;
    let s = c.inv_relax() * c.r3();
    Ok(s * (2.0 * s * c.bke() - c.eps() - (c.r2() * c.be() + c.r1() * c.r1()) * a1))
}

/// Corrected modes `(a, o, z, q)` of the compressible block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectedModes4 {
    pub a: Complex64,
    pub o: Complex64,
    pub z: Complex64,
    pub q: Complex64,
    pub a1: f64,
    pub a2: f64,
}

/// Corrected modes `(v, w)` of the incompressible block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectedModes2 {
    pub v: Complex64,
    pub w: Complex64,
}

impl CorrectedModes4 {
    pub fn as_vector(&self) -> ModeState4 {
        Vector4::new(self.a, self.o, self.z, self.q)
    }
}

impl CorrectedModes2 {
    pub fn as_vector(&self) -> ModeState2 {
        Vector2::new(self.v, self.w)
    }
}

/// Real matrix `T4` with `(a, o, z, q) = T4 (rho, d, eta, q)`.
pub fn transform4(r: f64, c: &Coeffs) -> Result<Matrix4<f64>> {
    let a1 = a1(r, c)?;
    let s = c.inv_relax() * c.r3();
    #[rustfmt::skip]
    let t = Matrix4::new(
        1.0, 0.0, 0.0, s * c.r1() * r * a1,
        0.0, 1.0, 0.0, s,
        0.0, 0.0, 1.0, s * c.be() * r * a1,
        0.0, 0.0, 0.0, 1.0,
    );
    Ok(t)
}

/// Real matrix `T2` with `(v, w) = T2 (Pu, P div tau)`.
pub fn transform2(c: &Coeffs) -> Matrix2<f64> {
    Matrix2::new(1.0, c.inv_relax() * c.r3(), 0.0, 1.0)
}

/// Inverse of the unit upper-triangular `T4`.
fn inverse4(t: &Matrix4<f64>) -> Matrix4<f64> {
    let mut inv = Matrix4::identity();
    for i in 0..3 {
        inv[(i, 3)] = -t[(i, 3)];
    }
    inv
}

pub fn corrected_modes4(x: &ModeState4, r: f64, c: &Coeffs) -> Result<CorrectedModes4> {
    let t = transform4(r, c)?.map(Complex64::from);
    let y = t * x;
    Ok(CorrectedModes4 {
        a: y[0],
        o: y[1],
        z: y[2],
        q: y[3],
        a1: a1(r, c)?,
        a2: a2(r, c)?,
    })
}

pub fn from_corrected4(m: &CorrectedModes4, r: f64, c: &Coeffs) -> Result<ModeState4> {
    let inv = inverse4(&transform4(r, c)?).map(Complex64::from);
    Ok(inv * m.as_vector())
}

pub fn corrected_modes2(x: &ModeState2, c: &Coeffs) -> CorrectedModes2 {
    let y = transform2(c).map(Complex64::from) * x;
    CorrectedModes2 { v: y[0], w: y[1] }
}

pub fn from_corrected2(m: &CorrectedModes2, c: &Coeffs) -> ModeState2 {
    let s = c.inv_relax() * c.r3();
    Vector2::new(m.v - m.w * s, m.w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::symbol::SymbolMatrix4;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coeffs() -> Coeffs {
        Coeffs::new(ModelParams::default()).unwrap()
    }

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_radius_modes() {
        let c = coeffs();
        let x = Vector4::new(cz(1.0, 0.5), cz(-2.0, 0.0), cz(0.3, 0.1), cz(0.7, -0.2));
        let m = corrected_modes4(&x, 0.0, &c).unwrap();
        let s = c.inv_relax() * c.r3();
        assert_eq!(m.a, x[0]);
        assert_eq!(m.z, x[2]);
        assert!((m.o - (x[1] + x[3] * s)).norm() < 1e-15);
        assert_eq!(m.q, x[3]);
        let v = corrected_modes2(&Vector2::new(x[0], x[3]), &c);
        assert!((v.v - (x[0] + x[3] * s)).norm() < 1e-15);
    }

    #[test]
    fn no_stress_means_no_correction() {
        let c = coeffs();
        let x = Vector4::new(cz(1.0, 0.5), cz(-2.0, 0.0), cz(0.3, 0.1), cz(0.0, 0.0));
        let m = corrected_modes4(&x, 0.37, &c).unwrap();
        assert_eq!(m.as_vector(), x);
    }

    #[test]
    fn round_trip() {
        let c = coeffs();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let x = Vector4::from_fn(|_, _| {
                cz(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let back = from_corrected4(&corrected_modes4(&x, 0.2, &c).unwrap(), 0.2, &c).unwrap();
            assert!((back - x).norm() <= 1e-12 * x.norm());
            let y = Vector2::new(x[0], x[1]);
            assert!(
                (from_corrected2(&corrected_modes2(&y, &c), &c) - y).norm() <= 1e-12 * y.norm()
            );
        }
    }

    #[test]
    fn degenerate_denominator() {
        let c = Coeffs::new(ModelParams {
            eps: 0.1,
            ..Default::default()
        })
        .unwrap();
        // Coefficient of r^2 is 0.1 - 2 = -1.9; the denominator vanishes near r = 0.725.
        assert!(a1(0.5, &c).is_ok());
        assert!(matches!(
            a1(1.0, &c),
            Err(Error::DegenerateDenominator { .. })
        ));
    }

    #[test]
    fn a2_finite_on_small_radii() {
        let c = coeffs();
        for i in 0..=50 {
            assert!(a2(i as f64 * 0.01, &c).unwrap().is_finite());
        }
    }

    /// In corrected variables the compressible system takes the reduced form
    /// used in the low-frequency analysis; compare row by row.
    #[test]
    fn reduced_system_rows() {
        let c = coeffs();
        let r = 0.23;
        let t = transform4(r, &c).unwrap();
        let m = SymbolMatrix4::new(r, &c).m;
        let n = t * m * inverse4(&t);
        let a1 = a1(r, &c).unwrap();
        let a2 = a2(r, &c).unwrap();
        let s = c.inv_relax() * c.r3();
        let (bke, be, r1, r2, eps) = (c.bke(), c.be(), c.r1(), c.r2(), c.eps());
        let r3p = r.powi(3);
        #[rustfmt::skip]
        let want = Matrix4::new(
            0.0, r1 * r + 2.0 * s * r1 * bke * a1 * r3p, 0.0, 0.0,
            -r1 * r, 2.0 * s * bke * r * r, -r2 * r, -a2 * r * r,
            0.0, be * r + 2.0 * s * be * bke * a1 * r3p, eps * r * r, -eps * s * be * a1 * r3p,
            0.0, 2.0 * bke * r * r, 0.0, 1.0 / a1,
        );
        assert!((n - want).abs().max() < 1e-13, "{n}\n{want}");
    }
}
