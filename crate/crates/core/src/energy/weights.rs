use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Coeffs;

/// Cross-term weights of the composite functionals together with the
/// generic constant `c_gen` used to instantiate their smallness constraints.
///
/// `eps1, eps2` weight the full-norm functional J, `eps3, eps4` H1,
/// `eps5, eps6` H2 and `eps7, eps8` H3. `aux` is the auxiliary Young
/// constant shared by all constraints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalWeights {
    pub eps: [f64; 8],
    pub eps_tilde: f64,
    pub c_gen: f64,
    pub aux: f64,
    /// Smallness gate on the `H^3` norm.
    pub delta: f64,
    /// Low/high cutoff used by H3 and the Gronwall source.
    pub c0: f64,
}

struct Consts {
    c: f64,
    aux: f64,
    r1: f64,
    bke: f64,
    /// r2 eps / (beta eta_bar); `None` when r2 = 0.
    eta: Option<f64>,
    /// r3 eps / (beta k eta_bar).
    tau: f64,
    /// r3 / (beta k eta_bar).
    r3b: f64,
    /// A0 r3 / (lambda beta k eta_bar).
    relax: f64,
    c0: f64,
}

impl Consts {
    fn new(co: &Coeffs, c: f64, c0: f64) -> Self {
        let bke = co.bke();
        let aux = bke * co.r1() / (64.0 * c * c);
        Consts {
            c,
            aux,
            r1: co.r1(),
            bke,
            eta: (!co.scaled.r2_degenerate()).then(|| co.r2() * co.eps() / co.be()),
            tau: co.r3() * co.eps() / bke,
            r3b: co.r3() / bke,
            relax: 2.0 * co.relax() * co.r3() / bke,
            c0,
        }
    }

    /// Bounds on `(a, b)` that do not involve the partner weight.
    fn own_bounds(&self, pair: usize) -> (Vec<f64>, Vec<f64>) {
        let (c, aux) = (self.c, self.aux);
        let eta = |d: f64| self.eta.map(|e| e / d);
        match pair {
            0..=2 => {
                let mut a: Vec<f64> = [eta(16.0 * c), Some(self.tau / (16.0 * c))]
                    .into_iter()
                    .flatten()
                    .collect();
                if pair == 0 {
                    a.push(1.0 / (4.0 * c));
                }
                let b = [
                    eta(16.0 * c * aux),
                    Some(self.tau / (16.0 * c)),
                    Some(self.r3b / (4.0 * c)),
                ]
                .into_iter()
                .flatten()
                .collect();
                (a, b)
            }
            _ => {
                let c02 = self.c0 * self.c0;
                let a = [Some(self.relax / (16.0 * c)), eta(8.0 * c / c02)]
                    .into_iter()
                    .flatten()
                    .collect();
                let b = [
                    Some(self.relax / (16.0 * c)),
                    Some(self.tau / (8.0 * c)),
                    eta(8.0 * c * aux / c02),
                ]
                .into_iter()
                .flatten()
                .collect();
                (a, b)
            }
        }
    }

    fn coupled(&self, a: f64, b: f64) -> (f64, f64) {
        (
            b * self.bke / (8.0 * self.c),
            a * self.r1 / (8.0 * self.c * self.aux),
        )
    }
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

impl FunctionalWeights {
    /// Largest weights satisfying every constraint for `c_gen`, with
    /// `aux = beta k eta_bar r1 / (64 c_gen^2)`.
    pub fn construct(co: &Coeffs, c_gen: f64, c0: f64, delta: f64) -> Result<Self> {
        if !(c_gen > 0.0 && c_gen.is_finite()) {
            return Err(Error::param(
                "c_gen",
                format!("must be positive, got {c_gen}"),
            ));
        }
        if !(c0 > 0.0 && c0 <= 1.0) {
            return Err(Error::param("c0", format!("must lie in (0, 1], got {c0}")));
        }
        if !(delta > 0.0) {
            return Err(Error::param(
                "delta",
                format!("must be positive, got {delta}"),
            ));
        }
        let k = Consts::new(co, c_gen, c0);
        let mut eps = [0.0; 8];
        for pair in 0..4 {
            let (a_own, b_own) = k.own_bounds(pair);
            let b0 = min(&b_own);
            let a = min(&a_own).min(k.coupled(0.0, b0).0);
            let b = b0.min(k.coupled(a, 0.0).1);
            eps[2 * pair] = a;
            eps[2 * pair + 1] = b;
        }
        let w = FunctionalWeights {
            eps,
            eps_tilde: co.eps_tilde(),
            c_gen,
            aux: k.aux,
            delta,
            c0,
        };
        w.check(co)?;
        Ok(w)
    }

    pub fn default_for(co: &Coeffs) -> Result<Self> {
        Self::construct(co, 10.0, 1.0, 1e-2)
    }

    /// Verifies positivity and every constraint inequality (relative slack 1e-12).
    pub fn check(&self, co: &Coeffs) -> Result<()> {
        if self.eps.iter().any(|e| !(*e > 0.0)) || !(self.eps_tilde > 0.0) {
            return Err(Error::param("eps", "weights must be positive"));
        }
        let k = Consts::new(co, self.c_gen, self.c0);
        if self.aux > k.aux * (1.0 + 1e-12) {
            return Err(Error::param("aux", format!("exceeds {}", k.aux)));
        }
        let k = Consts { aux: self.aux, ..k };
        for pair in 0..4 {
            let (a, b) = (self.eps[2 * pair], self.eps[2 * pair + 1]);
            let (mut a_b, mut b_b) = k.own_bounds(pair);
            let (ca, cb) = k.coupled(a, b);
            a_b.push(ca);
            b_b.push(cb);
            let tol = 1.0 + 1e-12;
            if a > min(&a_b) * tol || b > min(&b_b) * tol {
                return Err(Error::param(
                    "eps",
                    format!(
                        "pair ({}, {}) violates its constraints",
                        2 * pair + 1,
                        2 * pair + 2
                    ),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use approx::assert_relative_eq;

    #[test]
    fn default_weights() {
        let co = Coeffs::new(ModelParams::default()).unwrap();
        let w = FunctionalWeights::construct(&co, 10.0, 1.0, 1e-2).unwrap();
        assert_relative_eq!(w.aux, 3.125e-4, max_relative = 1e-12);
        assert_relative_eq!(w.eps[3], 3.125e-3, max_relative = 1e-12);
        assert_relative_eq!(
            w.eps[2],
            3.125e-3 * 2f64.sqrt() / 80.0,
            max_relative = 1e-12
        );
        assert!(w.eps.iter().all(|e| *e > 0.0 && *e < 0.03));
    }

    #[test]
    fn rejects_oversized_weights() {
        let co = Coeffs::new(ModelParams::default()).unwrap();
        let mut w = FunctionalWeights::default_for(&co).unwrap();
        w.eps[2] *= 2.0;
        assert!(w.check(&co).is_err());
        assert!(FunctionalWeights::construct(&co, 0.0, 1.0, 1e-2).is_err());
    }

    #[test]
    fn degenerate_r2_still_constructs() {
        let co = Coeffs::new(ModelParams {
            l: 1.0,
            z: 0.0,
            ..Default::default()
        })
        .unwrap();
        let w = FunctionalWeights::default_for(&co).unwrap();
        assert!(w.eps.iter().all(|e| *e > 0.0));
    }
}
