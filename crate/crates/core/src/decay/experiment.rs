use serde::{Deserialize, Serialize};

use super::fit::{log_times, DecaySeries};
use crate::energy::{
    audit_states, gronwall_level, Energy, EnergyReport, FunctionalWeights, GronwallFit,
    FLAG_INCREASE,
};
use crate::error::{Error, Result};
use crate::model::{Coeffs, ModelParams};
use crate::solver::{simulate, Recorder, RunSummary, SimConfig, Trajectory};
use crate::symbol::{
    driven_tau_norms, lowfreq_decay_norms, scan_critical_radius, DrivenProfile, Profile,
    QuadConfig, ScanConfig, ScanResult,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    #[default]
    LinearDecay,
    DrivenTau,
    SymbolScan,
    Simulate,
    EnergyAudit,
}

/// Settings of the energy audit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditConfig {
    pub c_gen: f64,
    pub delta: f64,
    /// Cutoff of the low/high split used by H3 and the Gronwall source.
    pub c0: f64,
    /// A residual flag is raised when `residual > tol_diss * N`.
    pub tol_diss: f64,
    /// Relative growth per sample tolerated before the increase flag.
    pub tol_rel: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            c_gen: 10.0,
            delta: 1e-2,
            c0: 1.0,
            tol_diss: 1e-6,
            tol_rel: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub params: ModelParams,
    /// Overrides the seeds of the scan and of the initial data.
    pub seed: Option<u64>,
    /// Derivative orders; empty selects 0..=3 for linear decay and 0..=3
    /// for driven stress (order 3 reported without a target).
    pub orders: Vec<u32>,
    /// Fit window `[t_min, t_max]`.
    pub window: (f64, f64),
    /// Log-spaced sample times in the window.
    pub samples: usize,
    /// Low-frequency cutoff; computed by the symbol scan when absent.
    pub c0: Option<f64>,
    /// Slope tolerance.
    pub tolerance: f64,
    /// Tolerance of the third-derivative stress surrogate.
    pub surrogate_tolerance: f64,
    pub quadrature: QuadConfig,
    pub profile: Profile,
    pub driven: DrivenProfile,
    pub scan: ScanConfig,
    pub sim: SimConfig,
    pub audit: AuditConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::default(),
            params: ModelParams::default(),
            seed: None,
            orders: Vec::new(),
            window: (10.0, 1e3),
            samples: 40,
            c0: None,
            tolerance: 0.1,
            surrogate_tolerance: 0.15,
            quadrature: QuadConfig::default(),
            profile: Profile::default(),
            driven: DrivenProfile::default(),
            scan: ScanConfig::default(),
            sim: SimConfig {
                length: 4.0 * std::f64::consts::PI,
                ..SimConfig::default()
            },
            audit: AuditConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let (a, b) = self.window;
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(Error::Config(format!("invalid window ({a}, {b})")));
        }
        if self.samples < 10 {
            return Err(Error::Config("at least 10 samples are needed".into()));
        }
        if let Some(c0) = self.c0 {
            if !(c0 > 0.0 && c0 <= 1.0) {
                return Err(Error::Config(format!("c0 must lie in (0, 1], got {c0}")));
            }
        }
        if self.orders.iter().any(|&m| m > 3) {
            return Err(Error::Config("orders must be at most 3".into()));
        }
        if matches!(
            self.kind,
            ExperimentKind::Simulate | ExperimentKind::EnergyAudit
        ) {
            self.sim_config().validate()?;
        }
        Ok(())
    }

    /// Simulation settings with the shared parameters and seed applied.
    pub fn sim_config(&self) -> SimConfig {
        let mut s = self.sim.clone();
        s.params = self.params;
        if let Some(seed) = self.seed {
            s.init.seed = seed;
        }
        s
    }

    fn scan_config(&self) -> ScanConfig {
        let mut s = self.scan.clone();
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        s
    }

    fn orders_or(&self, default: &[u32]) -> Vec<u32> {
        if self.orders.is_empty() {
            default.to_vec()
        } else {
            self.orders.clone()
        }
    }
}

/// One pass/fail check of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    fn near(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            value,
            target: Some(target),
            tolerance: Some(tol),
            pass: (value - target).abs() <= tol,
        }
    }

    fn holds(name: impl Into<String>, value: f64, pass: bool) -> Self {
        Check {
            name: name.into(),
            value,
            target: None,
            tolerance: None,
            pass,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub c0: Option<f64>,
    pub series: Vec<DecaySeries>,
    pub scan: Option<ScanResult>,
    pub run: Option<RunSummary>,
    pub energy: Option<EnergyReport>,
    pub gronwall: Vec<GronwallFit>,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        if let Some(c0) = self.c0 {
            s.push_str(&format!("c0 = {c0}\n"));
        }
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            match (c.target, c.tolerance) {
                (Some(t), Some(tol)) => s.push_str(&format!(
                    "{verdict} {}: {:.4} (target {t:.4} +- {tol})\n",
                    c.name, c.value
                )),
                _ => s.push_str(&format!("{verdict} {}: {:.6e}\n", c.name, c.value)),
            }
        }
        s
    }
}

/// Rate exponent of `||grad^m (rho, u, eta)||`.
pub fn lowfreq_target(m: u32) -> f64 {
    -(0.75 + 0.5 * m as f64)
}

/// Rate exponent of `||grad^m tau||` for `m <= 2`.
pub fn driven_target(m: u32) -> f64 {
    -(1.25 + 0.5 * m as f64)
}

/// Rate exponent of `||grad^3 tau||`.
pub const SURROGATE_TARGET: f64 = -2.25;

fn cutoff(cfg: &ExperimentConfig, c: &Coeffs, report: &mut ExperimentReport) -> Result<f64> {
    if let Some(c0) = cfg.c0 {
        return Ok(c0);
    }
    let scan = scan_critical_radius(c, &cfg.scan_config())?;
    let c0 = scan
        .c0
        .ok_or_else(|| Error::Domain("the symbol scan certified no radius".into()))?;
    report.scan = Some(scan);
    Ok(c0)
}

fn series(
    cfg: &ExperimentConfig,
    orders: &[u32],
    label: &str,
    norms: impl Fn(f64) -> Result<Vec<f64>>,
) -> Result<Vec<DecaySeries>> {
    let t = log_times(cfg.samples, cfg.window.0, cfg.window.1);
    let rows = t.iter().map(|&t| norms(t)).collect::<Result<Vec<_>>>()?;
    orders
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let mut s = DecaySeries::new(
                format!("{label}_m{m}"),
                t.clone(),
                rows.iter().map(|r| r[i]).collect(),
                cfg.window,
            )?;
            s.fit()?;
            Ok(s)
        })
        .collect()
}

/// Runs one experiment. Simulation output of the `simulate` kind streams to
/// `rec`; the other kinds do not use it.
pub fn run_experiment(cfg: &ExperimentConfig, rec: &mut dyn Recorder) -> Result<ExperimentReport> {
    cfg.validate()?;
    let c = Coeffs::new(cfg.params)?;
    let mut report = ExperimentReport {
        kind: cfg.kind,
        ..Default::default()
    };
    match cfg.kind {
        ExperimentKind::LinearDecay => {
            let c0 = cutoff(cfg, &c, &mut report)?;
            report.c0 = Some(c0);
            let orders = cfg.orders_or(&[0, 1, 2, 3]);
            report.series = series(cfg, &orders, "lowfreq", |t| {
                lowfreq_decay_norms(&orders, t, &cfg.profile, c0, &c, &cfg.quadrature)
            })?;
            for (s, &m) in report.series.iter().zip(&orders) {
                let slope = s.fit.expect("fitted").slope;
                report.checks.push(Check::near(
                    format!("lowfreq slope m={m}"),
                    slope,
                    lowfreq_target(m),
                    cfg.tolerance,
                ));
            }
        }
        ExperimentKind::DrivenTau => {
            let c0 = cutoff(cfg, &c, &mut report)?;
            report.c0 = Some(c0);
            let orders = cfg.orders_or(&[0, 1, 2, 3]);
            report.series = series(cfg, &orders, "driven_tau", |t| {
                driven_tau_norms(&orders, t, &cfg.driven, c0, &c, &cfg.quadrature)
            })?;
            for (s, &m) in report.series.iter().zip(&orders) {
                let slope = s.fit.expect("fitted").slope;
                if m <= 2 {
                    report.checks.push(Check::near(
                        format!("driven tau slope m={m}"),
                        slope,
                        driven_target(m),
                        cfg.tolerance,
                    ));
                }
                if m == 2 {
                    report.checks.push(Check::near(
                        "grad^3 tau surrogate slope",
                        slope,
                        SURROGATE_TARGET,
                        cfg.surrogate_tolerance,
                    ));
                }
            }
        }
        ExperimentKind::SymbolScan => {
            let scan = scan_critical_radius(&c, &cfg.scan_config())?;
            report.c0 = scan.c0;
            report.checks.push(Check::holds(
                "certified c0",
                scan.c0.unwrap_or(0.0),
                scan.c0.is_some_and(|c0| c0 > 0.0),
            ));
            report.scan = Some(scan);
        }
        ExperimentKind::Simulate => {
            let run = simulate(&cfg.sim_config(), rec)?;
            if let Some(d) = run.max_defect {
                report
                    .checks
                    .push(Check::holds("max equivalence defect", d, d <= 1e-7));
            }
            report.run = Some(run);
        }
        ExperimentKind::EnergyAudit => {
            let mut sim = cfg.sim_config();
            if sim.snapshot_every == 0 {
                sim.snapshot_every = 1;
            }
            let mut tr = Trajectory::default();
            let run = simulate(&sim, &mut tr)?;
            let states: Vec<_> = tr.snapshots.into_iter().map(|s| (s.t, s.state)).collect();
            let (rep, fits) = audit(&c, &cfg.audit, &states)?;
            report.c0 = Some(cfg.audit.c0);
            push_audit_checks(&mut report.checks, &rep, &fits);
            report.energy = Some(rep);
            report.gronwall = fits;
            report.run = Some(run);
        }
    }
    Ok(report)
}

/// Audits a sampled trajectory and fits the Gronwall form of every level.
pub fn audit(
    c: &Coeffs,
    cfg: &AuditConfig,
    states: &[(f64, crate::solver::FieldState)],
) -> Result<(EnergyReport, Vec<GronwallFit>)> {
    let first = states
        .first()
        .ok_or(Error::InsufficientSamples { need: 2, got: 0 })?;
    let weights = FunctionalWeights::construct(c, cfg.c_gen, cfg.c0, cfg.delta)?;
    let energy = Energy::new(first.1.grid(), *c, weights)?;
    let rep = audit_states(&energy, states, cfg.tol_diss, cfg.tol_rel)?;
    let fits = (1..=3)
        .map(|l| gronwall_level(&energy, &rep.samples, l))
        .collect::<Result<Vec<_>>>()?;
    Ok((rep, fits))
}

pub fn push_audit_checks(checks: &mut Vec<Check>, rep: &EnergyReport, fits: &[GronwallFit]) {
    let increases = rep
        .rows
        .iter()
        .filter(|r| r.flags & FLAG_INCREASE != 0)
        .count();
    checks.push(Check::holds(
        "samples with an energy increase",
        increases as f64,
        increases == 0,
    ));
    for (l, f) in fits.iter().enumerate() {
        checks.push(Check::holds(
            format!("gronwall C2 level {}", l + 1),
            f.c2,
            f.c2 > 0.0,
        ));
    }
}
