use nalgebra::SMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::ops::Ops;
use super::sources::{original_sources, reformulated_sources};
use super::state::{Modes, NCOMP};
use crate::error::{Error, Result};
use crate::model::{Coeffs, SYM_PAIRS};
use crate::spectral::Grid;
use crate::symbol::semigroup_pade;

pub type Matrix11 = SMatrix<f64, NCOMP, NCOMP>;

/// A semilinear system `X_t + L(xi) X = N(X)` on packed Fourier data.
pub trait System: Sync {
    fn grid(&self) -> Grid;
    /// Real per-mode linear operator acting on `(rho, -i u_hat, eta, stress)`.
    fn linear(&self, xi: [f64; 3]) -> Matrix11;
    /// Dealiased nonlinear terms, packed like the state.
    fn sources(&self, x: &Modes) -> Result<Modes>;
}

/// Rows shared by both systems: velocity coupling to the scalars and the
/// stress divergence, viscous damping, scalar transport and stress damping.
#[allow(clippy::too_many_arguments)]
fn linear_common(
    xi: [f64; 3],
    c: &Coeffs,
    rho_u: f64,
    u_rho: f64,
    u_eta: f64,
    u_stress: f64,
    eta_u: f64,
) -> Matrix11 {
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    let sp = &c.scaled;
    let mut l = Matrix11::zeros();
    for a in 0..3 {
        l[(0, 1 + a)] = -rho_u * xi[a];
        l[(1 + a, 0)] = u_rho * xi[a];
        l[(1 + a, 4)] = u_eta * xi[a];
        l[(4, 1 + a)] = -eta_u * xi[a];
        for b in 0..3 {
            l[(1 + a, 1 + b)] = sp.mu2 * xi[a] * xi[b] + if a == b { sp.mu1 * r2 } else { 0.0 };
        }
    }
    for (n, &(i, j)) in SYM_PAIRS.iter().enumerate() {
        l[(1 + i, 5 + n)] -= u_stress * xi[j];
        if i != j {
            l[(1 + j, 5 + n)] -= u_stress * xi[i];
        }
        l[(5 + n, 5 + n)] = c.relax() + c.eps() * r2;
    }
    l[(4, 4)] = c.eps() * r2;
    l
}

/// The reformulated perturbation system in `(rho', u', eta', tau)`.
#[derive(Clone, Debug)]
pub struct Reformulated {
    pub(crate) ops: Ops,
    pub coeffs: Coeffs,
}

impl Reformulated {
    pub fn new(grid: Grid, coeffs: Coeffs) -> Self {
        Reformulated {
            ops: Ops::new(grid),
            coeffs,
        }
    }
}

impl System for Reformulated {
    fn grid(&self) -> Grid {
        self.ops.grid
    }

    fn linear(&self, xi: [f64; 3]) -> Matrix11 {
        let c = &self.coeffs;
        let mut l = linear_common(xi, c, c.r1(), c.r1(), c.r2(), c.r3(), c.be());
        for (n, &(i, j)) in SYM_PAIRS.iter().enumerate() {
            l[(5 + n, 1 + i)] += c.bke() * xi[j];
            l[(5 + n, 1 + j)] += c.bke() * xi[i];
        }
        l
    }

    fn sources(&self, x: &Modes) -> Result<Modes> {
        reformulated_sources(&self.ops, &self.coeffs, x)
    }
}

/// The original system in total `(rho, u, eta, T)` with physical velocity,
/// evolved as perturbations of `(rho_bar, 0, eta_bar, k eta_bar I)`.
#[derive(Clone, Debug)]
pub struct Original {
    pub(crate) ops: Ops,
    pub coeffs: Coeffs,
}

impl Original {
    pub fn new(grid: Grid, coeffs: Coeffs) -> Self {
        Original {
            ops: Ops::new(grid),
            coeffs,
        }
    }
}

impl System for Original {
    fn grid(&self) -> Grid {
        self.ops.grid
    }

    fn linear(&self, xi: [f64; 3]) -> Matrix11 {
        let c = &self.coeffs;
        let p = &c.model;
        let rb = p.rho_bar;
        let ke = p.k * p.eta_bar;
        let mut l = linear_common(
            xi,
            c,
            rb,
            p.dpressure(rb) / rb,
            (p.k * p.l + 2.0 * p.z * p.eta_bar) / rb,
            1.0 / rb,
            p.eta_bar,
        );
        for (n, &(i, j)) in SYM_PAIRS.iter().enumerate() {
            l[(5 + n, 1 + i)] += ke * xi[j];
            l[(5 + n, 1 + j)] += ke * xi[i];
            if i == j {
                for a in 0..3 {
                    l[(5 + n, 1 + a)] -= ke * xi[a];
                }
                l[(5 + n, 4)] = -c.relax() * p.k;
            }
        }
        l
    }

    fn sources(&self, x: &Modes) -> Result<Modes> {
        original_sources(&self.ops, &self.coeffs, x)
    }
}

/// `exp(-dt L(xi))` for every dealiased mode.
#[derive(Clone, Debug)]
pub struct Propagator {
    pub dt: f64,
    modes: Vec<usize>,
    mats: Vec<Matrix11>,
}

impl Propagator {
    pub fn new<S: System>(sys: &S, dt: f64) -> Self {
        let grid = sys.grid();
        let modes = grid.resolved_modes();
        let mats = modes
            .par_iter()
            .map(|&p| semigroup_pade(&sys.linear(grid.xi(p)), dt))
            .collect();
        Propagator { dt, modes, mats }
    }

    /// Applies the propagator in place; unresolved modes are set to zero.
    pub fn apply(&self, x: &mut Modes) {
        let mut out: Modes = vec![vec![Complex64::default(); x[0].len()]; NCOMP];
        for (&p, m) in self.modes.iter().zip(&self.mats) {
            let v: [Complex64; NCOMP] = std::array::from_fn(|c| x[c][p]);
            for (r, o) in out.iter_mut().enumerate() {
                let mut s = Complex64::default();
                for (cidx, vc) in v.iter().enumerate() {
                    s += m[(r, cidx)] * vc;
                }
                o[p] = s;
            }
        }
        *x = out;
    }
}

fn axpy(y: &mut Modes, a: f64, x: &Modes) {
    for (yc, xc) in y.iter_mut().zip(x) {
        for (yv, xv) in yc.iter_mut().zip(xc) {
            *yv += a * xv;
        }
    }
}

/// Integrating-factor Heun scheme with cached exponentials:
/// `X* = E(X + dt N(X))`, `X' = E(X + dt/2 N(X)) + dt/2 N(X*)`.
pub struct Integrator<S: System> {
    pub sys: S,
    prop: Propagator,
    /// When false only the linear part is propagated.
    pub nonlinear: bool,
}

impl<S: System> Integrator<S> {
    pub fn new(sys: S, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        let prop = Propagator::new(&sys, dt);
        Ok(Integrator {
            sys,
            prop,
            nonlinear: true,
        })
    }

    pub fn dt(&self) -> f64 {
        self.prop.dt
    }

    /// Advances `x` by one step from time `t`. Positivity or finiteness
    /// failures are reported as blow-up at `t`.
    pub fn step(&self, x: &mut Modes, t: f64) -> Result<()> {
        let dt = self.prop.dt;
        if !self.nonlinear {
            self.prop.apply(x);
        } else {
            let blow = |e: Error| match e {
                Error::Domain(reason) => Error::BlowUp { t, reason },
                e => e,
            };
            let s0 = self.sys.sources(x).map_err(blow)?;
            let mut pred = x.clone();
            axpy(&mut pred, dt, &s0);
            self.prop.apply(&mut pred);
            let s1 = self.sys.sources(&pred).map_err(blow)?;
            axpy(x, 0.5 * dt, &s0);
            self.prop.apply(x);
            axpy(x, 0.5 * dt, &s1);
        }
        if x.iter()
            .flatten()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::BlowUp {
                t: t + dt,
                reason: "non-finite coefficient".into(),
            });
        }
        Ok(())
    }
}
