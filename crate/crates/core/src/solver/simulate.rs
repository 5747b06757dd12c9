use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::integrator::{Integrator, Original, Reformulated};
use super::state::{equivalence_defect, FieldState, InitSpec, OriginalState};
use crate::error::{Error, Result};
use crate::model::{Coeffs, ModelParams};
use crate::spectral::{inverse_transform, Fft3, Grid};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Points per axis.
    pub n: usize,
    /// Box side length.
    pub length: f64,
    pub params: ModelParams,
    pub init: InitSpec,
    pub dt: f64,
    pub t_end: f64,
    /// Steps between monitor rows.
    pub monitor_every: usize,
    /// Steps between snapshots; 0 keeps only the initial and final ones.
    pub snapshot_every: usize,
    /// Integrate the original system alongside and report the equivalence defect.
    pub oracle: bool,
    /// Propagate the linear part only.
    pub linear: bool,
    /// Advective Courant number above which a warning is logged.
    pub cfl: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 16,
            length: 2.0 * PI,
            params: ModelParams::default(),
            init: InitSpec::default(),
            dt: 0.01,
            t_end: 1.0,
            monitor_every: 1,
            snapshot_every: 0,
            oracle: false,
            linear: false,
            cfl: 0.5,
        }
    }
}

impl SimConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::cube(self.n, self.length)
    }

    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!(
                "t_end must be >= 0, got {}",
                self.t_end
            )));
        }
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end.max(1.0) {
            return Err(Error::Config(format!(
                "t_end {} is not a multiple of dt {}",
                self.t_end, self.dt
            )));
        }
        Ok(steps as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.steps()?;
        self.params.validate()?;
        if self.monitor_every == 0 {
            return Err(Error::Config("monitor_every must be >= 1".into()));
        }
        Ok(())
    }
}

/// One monitor row; `l2` holds `||rho||, ||u||, ||eta||, ||tau||`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonitorRow {
    pub step: usize,
    pub t: f64,
    pub min_rho: f64,
    pub min_eta: f64,
    pub mean_rho: f64,
    pub mean_eta: f64,
    pub l2: [f64; 4],
    pub equivalence_defect: Option<f64>,
}

impl MonitorRow {
    pub const HEADER: [&'static str; 11] = [
        "t",
        "min_rho",
        "min_eta",
        "mean_rho",
        "mean_eta",
        "l2_rho",
        "l2_u",
        "l2_eta",
        "l2_tau",
        "equivalence_defect",
        "step",
    ];
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub state: FieldState,
    pub original: Option<OriginalState>,
}

/// Receives output as it is produced so that partial runs are persisted.
pub trait Recorder {
    fn monitor(&mut self, row: &MonitorRow) -> Result<()>;
    fn snapshot(&mut self, snap: &Snapshot) -> Result<()>;
}

/// In-memory recorder.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub monitors: Vec<MonitorRow>,
    pub snapshots: Vec<Snapshot>,
}

impl Recorder for Trajectory {
    fn monitor(&mut self, row: &MonitorRow) -> Result<()> {
        self.monitors.push(*row);
        Ok(())
    }

    fn snapshot(&mut self, snap: &Snapshot) -> Result<()> {
        self.snapshots.push(snap.clone());
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub t: f64,
    pub state: FieldState,
    pub original: Option<OriginalState>,
    pub max_defect: Option<f64>,
}

fn monitor_row(
    step: usize,
    t: f64,
    s: &FieldState,
    o: Option<&OriginalState>,
    c: &Coeffs,
    fft: &Fft3,
) -> Result<(MonitorRow, f64)> {
    let rho = inverse_transform(&s.rho, fft)?;
    let eta = inverse_transform(&s.eta, fft)?;
    let u = inverse_transform(&s.u, fft)?;
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let umax = (0..s.grid().len())
        .map(|p| (0..3).map(|a| u.comps[a][p].powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let defect = match o {
        Some(o) => Some(equivalence_defect(s, o, c, fft)?),
        None => None,
    };
    let row = MonitorRow {
        step,
        t,
        min_rho: min(&rho.comps[0]) + c.model.rho_bar,
        min_eta: min(&eta.comps[0]) + c.model.eta_bar,
        mean_rho: s.rho.comps[0][0].re,
        mean_eta: s.eta.comps[0][0].re,
        l2: s.fields().map(|f| f.l2_norm_sq().sqrt()),
        equivalence_defect: defect,
    };
    Ok((row, c.beta() * umax))
}

/// Integrates the reformulated system from `cfg.init`, streaming monitor
/// rows and snapshots to `rec`. On blow-up the last valid state is recorded
/// as a snapshot before the error is returned.
pub fn simulate(cfg: &SimConfig, rec: &mut dyn Recorder) -> Result<RunSummary> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let init = cfg.init.generate(grid)?;
    simulate_from(cfg, init, rec)
}

/// As [`simulate`] from a given initial state.
pub fn simulate_from(
    cfg: &SimConfig,
    init: FieldState,
    rec: &mut dyn Recorder,
) -> Result<RunSummary> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    if init.grid() != grid {
        return Err(Error::GridMismatch(
            "initial state grid differs from the configuration".into(),
        ));
    }
    let c = Coeffs::new(cfg.params)?;
    let steps = cfg.steps()?;
    let fft = Fft3::for_grid(&grid);
    let mut integ = Integrator::new(Reformulated::new(grid, c), cfg.dt)?;
    integ.nonlinear = !cfg.linear;
    let mut oracle = if cfg.oracle {
        let mut o = Integrator::new(Original::new(grid, c), cfg.dt)?;
        o.nonlinear = !cfg.linear;
        Some(o)
    } else {
        None
    };
    let mut x = init.pack();
    let mut y = oracle
        .as_ref()
        .map(|_| OriginalState::from_reformulated(&init, &c).pack(&c));
    let unpack = |x: &super::state::Modes, y: &Option<super::state::Modes>| {
        (
            FieldState::unpack(grid, x),
            y.as_ref().map(|y| OriginalState::unpack(grid, y, &c)),
        )
    };
    let mut max_defect: Option<f64> = None;
    let mut warned = false;
    let h = grid.spacing();
    let mut emit = |step: usize,
                    x: &super::state::Modes,
                    y: &Option<super::state::Modes>,
                    rec: &mut dyn Recorder|
     -> Result<()> {
        let t = step as f64 * cfg.dt;
        let (s, o) = unpack(x, y);
        let (row, speed) = monitor_row(step, t, &s, o.as_ref(), &c, &fft)?;
        if let Some(d) = row.equivalence_defect {
            max_defect = Some(max_defect.map_or(d, |m: f64| m.max(d)));
        }
        if !warned && speed * cfg.dt / h > cfg.cfl {
            log::warn!(
                "advective Courant number {:.3} exceeds {} at t = {t}",
                speed * cfg.dt / h,
                cfg.cfl
            );
            warned = true;
        }
        rec.monitor(&row)
    };
    let snap = |step: usize,
                x: &super::state::Modes,
                y: &Option<super::state::Modes>,
                rec: &mut dyn Recorder| {
        let (state, original) = unpack(x, y);
        rec.snapshot(&Snapshot {
            step,
            t: step as f64 * cfg.dt,
            state,
            original,
        })
    };
    emit(0, &x, &y, rec)?;
    snap(0, &x, &y, rec)?;
    for n in 0..steps {
        let t = n as f64 * cfg.dt;
        let prev = (x.clone(), y.clone());
        let res = integ
            .step(&mut x, t)
            .and_then(|_| match (oracle.as_mut(), y.as_mut()) {
                (Some(o), Some(y)) => o.step(y, t),
                _ => Ok(()),
            });
        if let Err(e) = res {
            if n > 0 || steps > 0 {
                snap(n, &prev.0, &prev.1, rec)?;
            }
            return Err(e);
        }
        let step = n + 1;
        if step % cfg.monitor_every == 0 || step == steps {
            emit(step, &x, &y, rec)?;
        }
        if step == steps || (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) {
            snap(step, &x, &y, rec)?;
        }
    }
    let (state, original) = unpack(&x, &y);
    Ok(RunSummary {
        steps,
        t: steps as f64 * cfg.dt,
        state,
        original,
        max_defect,
    })
}

/// Dual integration with the oracle enabled; returns the run summary whose
/// `max_defect` is the largest equivalence defect over all monitor rows.
pub fn run_oracle(cfg: &SimConfig) -> Result<RunSummary> {
    let cfg = SimConfig {
        oracle: true,
        ..cfg.clone()
    };
    simulate(&cfg, &mut Trajectory::default())
}

/// Observed temporal order from runs with `dt`, `dt/2`, `dt/4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub dt: f64,
    /// `||X_dt - X_{dt/2}||` and `||X_{dt/2} - X_{dt/4}||` in `L^2`.
    pub diff_coarse: f64,
    pub diff_fine: f64,
    pub order: f64,
}

pub fn self_convergence(cfg: &SimConfig) -> Result<ConvergenceReport> {
    let grid = cfg.grid()?;
    let init = cfg.init.generate(grid)?;
    let run = |dt: f64| -> Result<FieldState> {
        let c = SimConfig {
            dt,
            monitor_every: usize::MAX,
            snapshot_every: 0,
            oracle: false,
            ..cfg.clone()
        };
        Ok(simulate_from(&c, init.clone(), &mut Discard)?.state)
    };
    let a = run(cfg.dt)?;
    let b = run(cfg.dt / 2.0)?;
    let d = run(cfg.dt / 4.0)?;
    let diff_coarse = a.sub(&b)?.l2_norm();
    let diff_fine = b.sub(&d)?.l2_norm();
    Ok(ConvergenceReport {
        dt: cfg.dt,
        diff_coarse,
        diff_fine,
        order: (diff_coarse / diff_fine).log2(),
    })
}

struct Discard;

impl Recorder for Discard {
    fn monitor(&mut self, _: &MonitorRow) -> Result<()> {
        Ok(())
    }
    fn snapshot(&mut self, _: &Snapshot) -> Result<()> {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ViscosityRow {
    pub mu: f64,
    pub nu: f64,
    /// `L^2` distance to the inviscid solution at `t_end`.
    pub deviation: f64,
}

/// Runs the configuration with `mu` from `mus` and `nu = nu_ratio * mu`
/// and reports the distance to the inviscid run at `t_end`.
pub fn vanishing_viscosity_experiment(
    base: &SimConfig,
    mus: &[f64],
    nu_ratio: f64,
) -> Result<Vec<ViscosityRow>> {
    if mus.iter().any(|&m| !(m >= 0.0)) {
        return Err(Error::Config("viscosities must be >= 0".into()));
    }
    if mus.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config(
            "viscosities must be strictly decreasing".into(),
        ));
    }
    let grid = base.grid()?;
    let init = base.init.generate(grid)?;
    let run = |mu: f64| -> Result<FieldState> {
        let mut cfg = SimConfig {
            monitor_every: usize::MAX,
            snapshot_every: 0,
            oracle: false,
            ..base.clone()
        };
        cfg.params.mu = mu;
        cfg.params.nu = nu_ratio * mu;
        Ok(simulate_from(&cfg, init.clone(), &mut Discard)?.state)
    };
    let reference = run(0.0)?;
    mus.iter()
        .map(|&mu| {
            let deviation = if mu == 0.0 {
                0.0
            } else {
                run(mu)?.sub(&reference)?.l2_norm()
            };
            Ok(ViscosityRow {
                mu,
                nu: nu_ratio * mu,
                deviation,
            })
        })
        .collect()
}
