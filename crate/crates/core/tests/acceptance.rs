//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use oldroyd_core::decay::{
    bernstein_sweep, convolution_sweep, lemma_checks, log_times, run_experiment, AuditConfig,
    ExperimentConfig, ExperimentKind, ExperimentReport,
};
use oldroyd_core::energy::EnergyRow;
use oldroyd_core::solver::{
    self_convergence, simulate, vanishing_viscosity_experiment, InitSpec, SimConfig, Trajectory,
};
use oldroyd_core::symbol::{
    bound_times, certificate2, certificate4, count_violations, fit_bound, sample_norms,
    scan_critical_radius, ScanConfig, ScanResult,
};
use oldroyd_core::{
    Coeffs, FrequencySplit, Grid, ModelParams, SymbolMatrix2, SymbolMatrix4, Valence,
};

type Outcome = Result<(bool, String), String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn coeffs() -> Coeffs {
    Coeffs::new(ModelParams::default()).unwrap()
}

fn small_data(n: usize, dt: f64, steps: usize) -> SimConfig {
    SimConfig {
        n,
        length: 4.0 * PI,
        dt,
        t_end: dt * steps as f64,
        init: InitSpec {
            h3: 1e-3,
            ..Default::default()
        },
        ..Default::default()
    }
}

fn checks_line(rep: &ExperimentReport) -> String {
    rep.checks
        .iter()
        .map(|c| format!("{} {:.4}", c.name, c.value))
        .collect::<Vec<_>>()
        .join("; ")
}

fn c1_lowfreq(scan: &ScanResult) -> Outcome {
    let c0 = scan.c0.ok_or("no certified radius")?;
    let mut pass = true;
    let mut parts = Vec::new();
    let mut slowest = 0.0f64;
    for m in 0..=3 {
        let cfg = ExperimentConfig {
            kind: ExperimentKind::LinearDecay,
            orders: vec![m],
            c0: Some(c0),
            ..Default::default()
        };
        let start = Instant::now();
        let rep = run_experiment(&cfg, &mut Trajectory::default()).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        pass &= rep.passed() && secs < 120.0 && cfg.quadrature.min_nodes >= 2000;
        parts.push(format!("m={m} slope {:.4}", rep.checks[0].value));
    }
    Ok((
        pass,
        format!(
            "{}; {} nodes minimum; slowest order {slowest:.1}s",
            parts.join(", "),
            ExperimentConfig::default().quadrature.min_nodes
        ),
    ))
}

fn c2_driven(scan: &ScanResult) -> Outcome {
    let cfg = ExperimentConfig {
        kind: ExperimentKind::DrivenTau,
        orders: vec![0, 1, 2],
        c0: scan.c0,
        ..Default::default()
    };
    let rep = run_experiment(&cfg, &mut Trajectory::default()).map_err(|e| e.to_string())?;
    Ok((rep.passed() && rep.checks.len() == 4, checks_line(&rep)))
}

fn c3_semigroup(scan: &ScanResult) -> Outcome {
    let c0 = scan.c0.ok_or("no certified radius")?;
    let c = coeffs();
    let radii: Vec<f64> = (1..=50).map(|i| c0 * i as f64 / 50.0).collect();
    let times = bound_times(40, 0.1, 1e3);
    let s4 =
        sample_norms(&radii, &times, |r| SymbolMatrix4::new(r, &c).m).map_err(|e| e.to_string())?;
    let s2 =
        sample_norms(&radii, &times, |r| SymbolMatrix2::new(r, &c).m).map_err(|e| e.to_string())?;
    let f4 = fit_bound(&s4, 10.0);
    let f2 = fit_bound(&s2, 10.0);
    let ok = |f: &oldroyd_core::symbol::BoundFit| f.c5 > 0.0 && f.c5.is_finite() && f.c <= 10.0;
    Ok((
        ok(&f4) && ok(&f2),
        format!(
            "4-block C5 {:.4} (C {:.3}); 2-block C5 {:.4} (C {:.3})",
            f4.c5, f4.c, f2.c5, f2.c
        ),
    ))
}

fn c4_lyapunov(scan: &ScanResult) -> Outcome {
    let c = coeffs();
    let (c0, c1, c2) = match (scan.c0, scan.c1, scan.c2) {
        (Some(a), Some(b), Some(d)) => (a, b, d),
        _ => return Ok((false, "no certified radius".into())),
    };
    let k4 = scan.kappa4.unwrap_or(0.0);
    let k2 = scan.kappa2.unwrap_or(0.0);
    let mut violations = 0;
    for i in 1..=20 {
        let r4 = c1 * i as f64 / 20.0;
        let cert = certificate4(r4, scan.eps_tilde, &c).map_err(|e| e.to_string())?;
        violations += count_violations(&cert, k4, 500, 1000 + i);
        let r2 = c2 * i as f64 / 20.0;
        violations += count_violations(&certificate2(r2, &c), k2, 500, 2000 + i);
    }
    Ok((
        c0 > 0.0 && k4 > 0.0 && k2 > 0.0 && violations == 0,
        format!(
            "c0 {c0}, c1 {c1}, c2 {c2}, kappa4 {k4:.4}, kappa2 {k2:.4}, violations {violations}"
        ),
    ))
}

fn c5_eigen() -> Outcome {
    let c = coeffs();
    let slow = |r: f64| {
        SymbolMatrix2::new(r, &c)
            .eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::INFINITY, f64::min)
    };
    let at = slow(0.1);
    let r = 0.01;
    let limit = c.r3() * c.bke() / c.relax();
    let ratio = slow(r) / (r * r) / limit;
    Ok((
        (at - 0.01).abs() <= 1e-10 && (ratio - 1.0).abs() <= 0.01,
        format!("slow eigenvalue at r=0.1 {at:.12}; ratio to limit at r=0.01 {ratio:.6}"),
    ))
}

fn c6_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    let mut growth = 0.0f64;
    let mut parts = Vec::new();
    for visc in [0.0, 0.1] {
        let mut cfg = small_data(32, 0.01, 200);
        cfg.oracle = true;
        cfg.params.mu = visc;
        cfg.params.nu = visc;
        let mut tr = Trajectory::default();
        let run = simulate(&cfg, &mut tr).map_err(|e| e.to_string())?;
        let d = run.max_defect.ok_or("no oracle defect")?;
        worst = worst.max(d);
        let size = |l2: &[f64; 4]| l2.iter().map(|v| v * v).sum::<f64>().sqrt();
        let first = size(&tr.monitors[0].l2);
        let g = tr
            .monitors
            .iter()
            .map(|m| size(&m.l2) / first)
            .fold(0.0, f64::max);
        growth = growth.max(g);
        parts.push(format!("mu=nu={visc}: defect {d:.3e}, max L2 ratio {g:.4}"));
    }
    Ok((worst <= 1e-7 && growth <= 1.01, parts.join("; ")))
}

fn c7_structure() -> Outcome {
    let cfg = SimConfig {
        monitor_every: 1,
        ..small_data(16, 0.01, 1000)
    };
    let mut tr = Trajectory::default();
    let run = simulate(&cfg, &mut tr).map_err(|e| e.to_string())?;
    let m0 = tr.monitors[0];
    let drift = tr.monitors.iter().fold(0.0f64, |a, m| {
        a.max((m.mean_rho - m0.mean_rho).abs())
            .max((m.mean_eta - m0.mean_eta).abs())
    });
    let symmetric = run.state.tau.valence == Valence::SymTensor && run.state.tau.comps.len() == 6;
    let mut conv = SimConfig {
        dt: 0.02,
        t_end: 1.0,
        ..small_data(16, 0.02, 50)
    };
    conv.init.h3 = 0.5;
    let order = self_convergence(&conv).map_err(|e| e.to_string())?.order;
    Ok((
        drift < 1e-11 && symmetric && (1.8..=2.5).contains(&order),
        format!(
            "mean drift over {} steps {drift:.3e}; tau stored symmetric {symmetric}; order {order:.4}",
            run.steps
        ),
    ))
}

fn audit_run(linear: bool) -> Result<ExperimentReport, String> {
    let cfg = ExperimentConfig {
        kind: ExperimentKind::EnergyAudit,
        sim: SimConfig {
            linear,
            snapshot_every: 1,
            ..small_data(16, 0.01, 200)
        },
        audit: AuditConfig::default(),
        ..Default::default()
    };
    run_experiment(&cfg, &mut Trajectory::default()).map_err(|e| e.to_string())
}

fn c8_energy() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut h1: Vec<Vec<f64>> = Vec::new();
    for linear in [true, false] {
        let rep = audit_run(linear)?;
        let rows: &[EnergyRow] = &rep.energy.as_ref().ok_or("no energy report")?.rows;
        h1.push(rows.iter().map(|r| r.h[0]).collect());
        let mut abs = f64::NEG_INFINITY;
        let mut rel = f64::NEG_INFINITY;
        for w in rows.windows(2) {
            for l in 0..3 {
                let d = w[1].h[l] - w[0].h[l];
                abs = abs.max(d);
                rel = rel.max(d / w[0].h[l]);
            }
        }
        let c2 = rep
            .gronwall
            .iter()
            .map(|f| f.c2)
            .fold(f64::INFINITY, f64::min);
        let ok = if linear { abs <= 1e-10 } else { rel <= 1e-6 };
        pass &= ok && c2 > 0.0 && rep.gronwall.len() == 3;
        parts.push(format!(
            "{}: max step increase {abs:.6e} (relative {rel:.6e}), min C2 {c2:.6}",
            if linear { "linear" } else { "nonlinear" }
        ));
    }
    let gap = h1[0]
        .iter()
        .zip(&h1[1])
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs() / x));
    parts.push(format!("max relative H1 gap between runs {gap:.3e}"));
    Ok((pass, parts.join("; ")))
}

fn c9_lemmas() -> Outcome {
    let grid = Grid::cube(16, 4.0 * PI).map_err(|e| e.to_string())?;
    let split = FrequencySplit::new(1.0).map_err(|e| e.to_string())?;
    let bern = bernstein_sweep(grid, &split, &[(1, 0), (2, 1), (3, 1)], 100, 0)
        .map_err(|e| e.to_string())?;
    let conv = convolution_sweep(&[(2.5, 1.5), (3.5, 0.5)], &log_times(40, 1.0, 1e4))
        .map_err(|e| e.to_string())?;
    let checks = lemma_checks(&bern, &conv);
    let line = checks
        .iter()
        .map(|c| format!("{} {:.4e}", c.name, c.value))
        .collect::<Vec<_>>()
        .join("; ");
    Ok((bern.len() == 300 && checks.iter().all(|c| c.pass), line))
}

fn c10_viscosity() -> Outcome {
    let base = SimConfig {
        ..small_data(16, 0.01, 100)
    };
    let rows = vanishing_viscosity_experiment(&base, &[1e-1, 1e-2, 1e-3], 1.0)
        .map_err(|e| e.to_string())?;
    let devs: Vec<f64> = rows.iter().map(|r| r.deviation).collect();
    let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
    let ratios: Vec<String> = devs
        .windows(2)
        .map(|w| format!("{:.2}", w[0] / w[1]))
        .collect();
    Ok((
        decreasing,
        format!(
            "deviations {} (successive ratios {})",
            devs.iter()
                .map(|d| format!("{d:.3e}"))
                .collect::<Vec<_>>()
                .join(", "),
            ratios.join(", ")
        ),
    ))
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let scan = scan_critical_radius(&coeffs(), &ScanConfig::default());
    let scan = match scan {
        Ok(s) => s,
        Err(e) => {
            println!("FAIL symbol scan: {e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: Vec<Criterion> = vec![
        (
            "C1 linear low-frequency decay",
            Box::new(|| c1_lowfreq(&scan)),
        ),
        ("C2 driven stress decay", Box::new(|| c2_driven(&scan))),
        ("C3 semigroup bound", Box::new(|| c3_semigroup(&scan))),
        ("C4 Lyapunov certificate", Box::new(|| c4_lyapunov(&scan))),
        ("C5 eigenvalue asymptotics", Box::new(c5_eigen)),
        ("C6 reformulation equivalence", Box::new(c6_equivalence)),
        ("C7 conservation and structure", Box::new(c7_structure)),
        ("C8 energy monotonicity", Box::new(c8_energy)),
        ("C9 lemma checks", Box::new(c9_lemmas)),
        ("C10 vanishing viscosity", Box::new(c10_viscosity)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "{} {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
