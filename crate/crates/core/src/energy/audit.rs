use rayon::prelude::*;
use serde::Serialize;

use super::functionals::{Energy, EnergySample};
use crate::error::{Error, Result};
use crate::solver::FieldState;

/// Audit flag bits.
pub const FLAG_OUT_OF_REGIME: u8 = 1;
pub const FLAG_RESIDUAL1: u8 = 2;
pub const FLAG_RESIDUAL2: u8 = 4;
pub const FLAG_RESIDUAL3: u8 = 8;
pub const FLAG_INCREASE: u8 = 16;

/// One audited time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyRow {
    pub t: f64,
    pub h: [f64; 3],
    pub j: f64,
    pub n: [f64; 3],
    /// Residuals of the three level inequalities.
    pub residual: [f64; 3],
    pub residual_j: f64,
    pub flags: u8,
}

impl EnergyRow {
    pub const HEADER: [&'static str; 11] = [
        "t",
        "H1",
        "H2",
        "H3",
        "N1",
        "N2",
        "N3",
        "residual1",
        "residual2",
        "residual3",
        "flags",
    ];

    pub fn flag_names(flags: u8) -> String {
        let names = [
            (FLAG_OUT_OF_REGIME, "out_of_regime"),
            (FLAG_RESIDUAL1, "residual1"),
            (FLAG_RESIDUAL2, "residual2"),
            (FLAG_RESIDUAL3, "residual3"),
            (FLAG_INCREASE, "increase"),
        ];
        let v: Vec<&str> = names
            .iter()
            .filter(|(b, _)| flags & b != 0)
            .map(|(_, n)| *n)
            .collect();
        v.join("|")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub samples: Vec<EnergySample>,
    pub rows: Vec<EnergyRow>,
}

/// Centered differences of `v(t)`, one-sided at the ends.
pub fn time_derivative(t: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    if t.len() != v.len() {
        return Err(Error::GridMismatch(
            "time and value series differ in length".into(),
        ));
    }
    if t.len() < 2 {
        return Err(Error::InsufficientSamples {
            need: 2,
            got: t.len(),
        });
    }
    if t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(
            "sample times must be strictly increasing".into(),
        ));
    }
    let n = t.len();
    Ok((0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (v[b] - v[a]) / (t[b] - t[a])
        })
        .collect())
}

/// `d/dt (H/2) + dissipation - right side` at every sample; the level
/// inequality asserts this is `<= 0`. Level 0 audits J with `dJ/dt`.
pub fn dissipation_audit(energy: &Energy, samples: &[EnergySample], level: u8) -> Result<Vec<f64>> {
    let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let (h, d): (Vec<f64>, Vec<f64>) = if level == 0 {
        samples
            .iter()
            .map(|s| (energy.functional_j(s), energy.dissipation_j(s)))
            .unzip()
    } else {
        samples
            .iter()
            .map(|s| {
                Ok((
                    0.5 * energy.functional(level, s)?,
                    energy.dissipation(level, s)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip()
    };
    let dh = time_derivative(&t, &h)?;
    Ok(dh.iter().zip(&d).map(|(a, b)| a + b).collect())
}

/// Samples every state in parallel and assembles the audit rows. A residual
/// flag is raised when `residual > tol_diss * N`, an increase flag when
/// some `H_level` grows by more than `tol_rel * H` over the previous sample.
pub fn audit_states(
    energy: &Energy,
    states: &[(f64, FieldState)],
    tol_diss: f64,
    tol_rel: f64,
) -> Result<EnergyReport> {
    let samples: Vec<EnergySample> = states
        .par_iter()
        .map(|(t, s)| energy.sample(*t, s))
        .collect::<Result<_>>()?;
    let res: Vec<Vec<f64>> = (1..=3)
        .map(|l| dissipation_audit(energy, &samples, l))
        .collect::<Result<_>>()?;
    let res_j = dissipation_audit(energy, &samples, 0)?;
    let mut rows: Vec<EnergyRow> = Vec::with_capacity(samples.len());
    for (i, s) in samples.iter().enumerate() {
        let h = [
            energy.functional(1, s)?,
            energy.functional(2, s)?,
            energy.functional(3, s)?,
        ];
        let n = [
            energy.plain(1, s)?,
            energy.plain(2, s)?,
            energy.plain(3, s)?,
        ];
        let residual = [res[0][i], res[1][i], res[2][i]];
        let mut flags = 0;
        if s.h3 > energy.weights.delta {
            flags |= FLAG_OUT_OF_REGIME;
        }
        for l in 0..3 {
            if residual[l] > tol_diss * n[l] {
                flags |= FLAG_RESIDUAL1 << l;
            }
        }
        if let Some(prev) = rows.last() {
            if (0..3).any(|l| h[l] > prev.h[l] * (1.0 + tol_rel)) {
                flags |= FLAG_INCREASE;
            }
        }
        rows.push(EnergyRow {
            t: s.t,
            h,
            j: energy.functional_j(s),
            n,
            residual,
            residual_j: res_j[i],
            flags,
        });
    }
    Ok(EnergyReport { samples, rows })
}

/// `(C2, C)` in `H(t) <= e^{-C2 t} H(0) + C int_0^t e^{-C2 (t-s)} S(s) ds`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GronwallFit {
    pub c2: f64,
    pub c: f64,
}

/// Smallest `C` making the inequality hold at every sample for a given
/// `C2` (trapezoidal Duhamel integral); infinite when no `C` works.
pub fn gronwall_constant(t: &[f64], h: &[f64], source: &[f64], c2: f64) -> f64 {
    let mut integral = 0.0;
    let mut worst: f64 = 0.0;
    let scale = h.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for i in 0..t.len() {
        if i > 0 {
            let dt = t[i] - t[i - 1];
            let d = (-c2 * dt).exp();
            integral = d * integral + 0.5 * dt * (d * source[i - 1] + source[i]);
        }
        let excess = h[i] - (-c2 * (t[i] - t[0])).exp() * h[0];
        if excess > 1e-14 * scale {
            if integral > 0.0 {
                worst = worst.max(excess / integral);
            } else {
                return f64::INFINITY;
            }
        }
    }
    worst
}

/// Largest `C2` for which the required constant stays within `c_max`.
pub fn gronwall_form(t: &[f64], h: &[f64], source: &[f64], c_max: f64) -> Result<GronwallFit> {
    if t.len() != h.len() || t.len() != source.len() {
        return Err(Error::GridMismatch("series differ in length".into()));
    }
    if t.len() < 2 {
        return Err(Error::InsufficientSamples {
            need: 2,
            got: t.len(),
        });
    }
    if h.iter()
        .chain(source)
        .any(|v| !(v.is_finite() && *v >= 0.0))
    {
        return Err(Error::Domain(
            "series must be finite and nonnegative".into(),
        ));
    }
    let ok = |c2: f64| gronwall_constant(t, h, source, c2) <= c_max;
    if !ok(0.0) {
        return Ok(GronwallFit {
            c2: 0.0,
            c: gronwall_constant(t, h, source, 0.0),
        });
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while ok(hi) && hi < 1e8 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(GronwallFit {
        c2: lo,
        c: gronwall_constant(t, h, source, lo),
    })
}

/// Gronwall fit of `H_level` with the low-frequency source of that level.
pub fn gronwall_level(energy: &Energy, samples: &[EnergySample], level: u8) -> Result<GronwallFit> {
    let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let h = samples
        .iter()
        .map(|s| energy.functional(level, s))
        .collect::<Result<Vec<_>>>()?;
    let src: Vec<f64> = samples.iter().map(|s| s.low[level as usize - 1]).collect();
    gronwall_form(&t, &h, &src, energy.weights.c_gen)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_quadratic() {
        let t: Vec<f64> = (0..5).map(|i| i as f64 * 0.5).collect();
        let v: Vec<f64> = t.iter().map(|x| x * x).collect();
        let d = time_derivative(&t, &v).unwrap();
        assert!((d[2] - 2.0).abs() < 1e-12);
        assert!(time_derivative(&t[..1], &v[..1]).is_err());
    }

    #[test]
    fn pure_exponential_envelope() {
        let t: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let h: Vec<f64> = t.iter().map(|x| (-0.7 * x).exp()).collect();
        let fit = gronwall_form(&t, &h, &vec![0.0; t.len()], 10.0).unwrap();
        assert!((fit.c2 - 0.7).abs() < 1e-6, "{fit:?}");
        assert_eq!(fit.c, 0.0);
    }

    #[test]
    fn gronwall_homogeneity() {
        let t: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let src: Vec<f64> = t.iter().map(|x| 0.3 * (1.0 + x).powf(-2.5)).collect();
        let h: Vec<f64> = t
            .iter()
            .map(|x| (-x).exp() + 0.2 * (1.0 + x).powf(-2.5))
            .collect();
        let a = gronwall_form(&t, &h, &src, 10.0).unwrap();
        let h4: Vec<f64> = h.iter().map(|v| 4.0 * v).collect();
        let s4: Vec<f64> = src.iter().map(|v| 4.0 * v).collect();
        let b = gronwall_form(&t, &h4, &s4, 10.0).unwrap();
        assert!(a.c2 > 0.0);
        assert!((a.c2 - b.c2).abs() <= 0.02 * a.c2);
    }
}
