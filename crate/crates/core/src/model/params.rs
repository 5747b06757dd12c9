use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of the compressible Oldroyd-B system.
///
/// Field names follow the usual notation; `l` is the constant `L` and `z`
/// the quadratic polymer-pressure coefficient. In configuration files the
/// keys `L`, `A0` are accepted as written.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub a: f64,
    pub gamma: f64,
    pub rho_bar: f64,
    pub eta_bar: f64,
    pub k: f64,
    #[serde(rename = "L", alias = "l")]
    pub l: f64,
    pub z: f64,
    pub eps: f64,
    #[serde(rename = "A0", alias = "a0")]
    pub a0: f64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            a: 1.0,
            gamma: 2.0,
            rho_bar: 1.0,
            eta_bar: 1.0,
            k: 1.0,
            l: 2.0,
            z: 0.5,
            eps: 1.0,
            a0: 2.0,
            lambda: 1.0,
            mu: 0.0,
            nu: 0.0,
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must be finite and > 0, got {v}"),
        ))
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        positive("a", self.a)?;
        if !(self.gamma.is_finite() && self.gamma > 1.0) {
            return Err(Error::param(
                "gamma",
                format!("must be > 1, got {}", self.gamma),
            ));
        }
        positive("rho_bar", self.rho_bar)?;
        positive("eta_bar", self.eta_bar)?;
        positive("k", self.k)?;
        if !(self.l.is_finite() && self.l >= 1.0) {
            return Err(Error::param("L", format!("must be >= 1, got {}", self.l)));
        }
        if !(self.z.is_finite() && self.z >= 0.0) {
            return Err(Error::param("z", format!("must be >= 0, got {}", self.z)));
        }
        positive("eps", self.eps)?;
        positive("A0", self.a0)?;
        positive("lambda", self.lambda)?;
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(Error::param("mu", format!("must be >= 0, got {}", self.mu)));
        }
        if !(self.nu.is_finite() && 2.0 * self.mu + 3.0 * self.nu >= 0.0) {
            return Err(Error::param("nu", "2 mu + 3 nu must be >= 0"));
        }
        Ok(())
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        self.a * rho.powf(self.gamma)
    }

    /// P'(rho) for the power law.
    pub fn dpressure(&self, rho: f64) -> f64 {
        self.a * self.gamma * rho.powf(self.gamma - 1.0)
    }

    /// Relaxation rate A0 / (2 lambda).
    pub fn relax(&self) -> f64 {
        self.a0 / (2.0 * self.lambda)
    }

    pub fn is_viscous(&self) -> bool {
        self.mu != 0.0 || self.nu != 0.0
    }
}

/// Scaled constants of the linearized system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledParams {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub beta: f64,
    pub mu1: f64,
    pub mu2: f64,
}

impl ScaledParams {
    /// `r2 = 0` happens exactly when L = 1 and z = 0; the eta weight
    /// `r2 / (beta eta_bar)` of the energy functionals then degenerates.
    pub fn r2_degenerate(&self) -> bool {
        self.r2 == 0.0
    }
}

pub fn derive_scaled(p: &ModelParams) -> Result<ScaledParams> {
    p.validate()?;
    let r1 = p.dpressure(p.rho_bar).sqrt();
    Ok(ScaledParams {
        r1,
        r2: (p.k * (p.l - 1.0) + 2.0 * p.z * p.eta_bar) / r1,
        r3: 1.0 / r1,
        beta: r1 / p.rho_bar,
        mu1: p.mu / p.rho_bar,
        mu2: (p.mu + p.nu) / p.rho_bar,
    })
}

/// h(rho') = (P'(rho_bar)/rho_bar - P'(rho)/rho) / beta with rho = rho' + rho_bar.
pub fn h_fn(rho_pert: f64, sp: &ScaledParams, p: &ModelParams) -> Result<f64> {
    check_density(rho_pert, p)?;
    Ok(h_unchecked(rho_pert, sp, p))
}

/// g(rho') = (1/rho_bar - 1/rho) / beta with rho = rho' + rho_bar.
pub fn g_fn(rho_pert: f64, sp: &ScaledParams, p: &ModelParams) -> Result<f64> {
    check_density(rho_pert, p)?;
    Ok(g_unchecked(rho_pert, sp, p))
}

fn check_density(rho_pert: f64, p: &ModelParams) -> Result<()> {
    let rho = rho_pert + p.rho_bar;
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "total density {rho} is not positive"
        )))
    }
}

#[inline]
pub(crate) fn h_unchecked(rho_pert: f64, sp: &ScaledParams, p: &ModelParams) -> f64 {
    let rho = rho_pert + p.rho_bar;
    (p.dpressure(p.rho_bar) / p.rho_bar - p.dpressure(rho) / rho) / sp.beta
}

#[inline]
pub(crate) fn g_unchecked(rho_pert: f64, sp: &ScaledParams, p: &ModelParams) -> f64 {
    let rho = rho_pert + p.rho_bar;
    (1.0 / p.rho_bar - 1.0 / rho) / sp.beta
}

/// Model and scaled constants bundled together, with the combinations the
/// symbol, solver and energy code use repeatedly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coeffs {
    pub model: ModelParams,
    pub scaled: ScaledParams,
}

impl Coeffs {
    pub fn new(model: ModelParams) -> Result<Self> {
        let scaled = derive_scaled(&model)?;
        Ok(Coeffs { model, scaled })
    }

    pub fn r1(&self) -> f64 {
        self.scaled.r1
    }
    pub fn r2(&self) -> f64 {
        self.scaled.r2
    }
    pub fn r3(&self) -> f64 {
        self.scaled.r3
    }
    pub fn beta(&self) -> f64 {
        self.scaled.beta
    }
    pub fn eps(&self) -> f64 {
        self.model.eps
    }
    pub fn relax(&self) -> f64 {
        self.model.relax()
    }
    /// beta k eta_bar, the velocity-to-stress coupling.
    pub fn bke(&self) -> f64 {
        self.scaled.beta * self.model.k * self.model.eta_bar
    }
    /// beta eta_bar, the velocity-to-polymer coupling.
    pub fn be(&self) -> f64 {
        self.scaled.beta * self.model.eta_bar
    }
    /// 2 lambda / A0.
    pub fn inv_relax(&self) -> f64 {
        1.0 / self.model.relax()
    }
    /// Weight r2 / (beta eta_bar) of eta in the quadratic functionals; 1 when r2 = 0.
    pub fn eta_weight(&self) -> f64 {
        if self.scaled.r2_degenerate() {
            1.0
        } else {
            self.scaled.r2 / self.be()
        }
    }
    /// Weight r3 / (2 beta k eta_bar) of tau in the quadratic functionals.
    pub fn tau_weight(&self) -> f64 {
        self.scaled.r3 / (2.0 * self.bke())
    }
    /// Default Lyapunov cross weight min{r1 eps/(2 r2 beta eta_bar), lambda r3 beta k eta_bar/(A0 r1)}.
    pub fn eps_tilde(&self) -> f64 {
        let p = &self.model;
        let second = p.lambda * self.r3() * self.bke() / (p.a0 * self.r1());
        if self.scaled.r2_degenerate() {
            second
        } else {
            let first = self.r1() * p.eps / (2.0 * self.r2() * self.be());
            first.min(second)
        }
    }
    /// Spatial weight (h(rho)+beta rho)/(r1+beta rho) of |grad^3 rho|^2.
    #[inline]
    pub fn density_weight(&self, rho_pert: f64) -> f64 {
        let b = self.beta();
        (h_unchecked(rho_pert, &self.scaled, &self.model) + b * rho_pert)
            / (self.r1() + b * rho_pert)
    }
}
