mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use oldroyd_core::decay::{
    audit, bernstein_sweep, convolution_sweep, lemma_checks, log_times, push_audit_checks,
    run_experiment, ExperimentKind, ExperimentReport,
};
use oldroyd_core::solver::read_state;
use oldroyd_core::{Coeffs, Error, ExperimentConfig, FrequencySplit, Grid};

use output::{write_csv, FileRecorder};

/// Exit codes.
const PASS: u8 = 0;
const FAILED: u8 = 1;
const ABORT: u8 = 2;
const CONFIG: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "oldroyd",
    version,
    about = "Decay experiments for the compressible Oldroyd-B system"
)]
struct Cli {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for random initial data and certificate sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Low-frequency decay of (rho, u, eta, div tau) on the linear semigroup.
    LinearDecay(DecayArgs),
    /// Decay of the stress driven by the linear velocity.
    DrivenTau(DecayArgs),
    /// Lyapunov certificate scan for the critical radius c0.
    SymbolScan {
        /// Radii in (0, r_max].
        #[arg(long)]
        points: Option<usize>,
        /// Random states per radius and block.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Nonlinear pseudo-spectral simulation.
    Simulate(SimArgs),
    /// Energy functionals and dissipation audit of a trajectory.
    EnergyAudit {
        /// Directory of snapshot files written by `simulate`; when absent a
        /// simulation is run from the configuration.
        #[arg(long)]
        snapshots: Option<PathBuf>,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Bernstein inequality and convolution lemma checks.
    CheckLemmas {
        /// Random fields in the Bernstein sweep.
        #[arg(long, default_value_t = 100)]
        fields: usize,
        /// Grid points per axis of the Bernstein fields.
        #[arg(long, default_value_t = 16)]
        n: usize,
        /// Cutoff of the frequency split.
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
    },
}

#[derive(Args, Debug)]
struct DecayArgs {
    /// Derivative orders, e.g. `0,1,2`.
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<u32>>,
    /// Low-frequency cutoff; computed by the symbol scan when absent.
    #[arg(long)]
    c0: Option<f64>,
    /// Sample times in the fit window.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// H^3 norm of the random initial data.
    #[arg(long)]
    amplitude: Option<f64>,
    /// Integrate the original system alongside.
    #[arg(long)]
    oracle: bool,
    /// Propagate the linear part only.
    #[arg(long)]
    linear: bool,
    #[arg(long)]
    snapshot_every: Option<usize>,
}

impl SimArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        let s = &mut cfg.sim;
        if let Some(n) = self.n {
            s.n = n;
        }
        if let Some(dt) = self.dt {
            s.dt = dt;
        }
        if let Some(t) = self.t_end {
            s.t_end = t;
        }
        if let Some(a) = self.amplitude {
            s.init.h3 = a;
        }
        if let Some(k) = self.snapshot_every {
            s.snapshot_every = k;
        }
        s.oracle |= self.oracle;
        s.linear |= self.linear;
    }
}

impl DecayArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(o) = &self.orders {
            cfg.orders = o.clone();
        }
        if self.c0.is_some() {
            cfg.c0 = self.c0;
        }
        if let Some(s) = self.samples {
            cfg.samples = s;
        }
    }
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Config(anyhow::Error),
    Abort(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidParam { .. } => Failure::Config(e.into()),
            _ => Failure::Abort(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<Error>() {
            Ok(e) => e.into(),
            Err(e) => Failure::Abort(e),
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))
                .map_err(Failure::Config)?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", p.display()))
                .map_err(Failure::Config)?
        }
        None => ExperimentConfig::default(),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(CONFIG);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::from(PASS),
        Ok(false) => ExitCode::from(FAILED),
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(CONFIG)
        }
        Err(Failure::Abort(e)) => {
            eprintln!("aborted: {e:#}");
            ExitCode::from(ABORT)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let mut cfg = load_config(cli)?;
    let out = &cli.out;
    fs::create_dir_all(out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(Failure::Abort)?;
    let report = match &cli.command {
        Command::LinearDecay(a) => {
            cfg.kind = ExperimentKind::LinearDecay;
            a.apply(&mut cfg);
            experiment(&cfg, out)?
        }
        Command::DrivenTau(a) => {
            cfg.kind = ExperimentKind::DrivenTau;
            a.apply(&mut cfg);
            experiment(&cfg, out)?
        }
        Command::SymbolScan { points, samples } => {
            cfg.kind = ExperimentKind::SymbolScan;
            if let Some(p) = points {
                cfg.scan.points = *p;
            }
            if let Some(s) = samples {
                cfg.scan.samples = *s;
            }
            experiment(&cfg, out)?
        }
        Command::Simulate(a) => {
            cfg.kind = ExperimentKind::Simulate;
            a.apply(&mut cfg);
            experiment(&cfg, out)?
        }
        Command::EnergyAudit {
            snapshots: None,
            sim,
        } => {
            cfg.kind = ExperimentKind::EnergyAudit;
            sim.apply(&mut cfg);
            experiment(&cfg, out)?
        }
        Command::EnergyAudit {
            snapshots: Some(dir),
            ..
        } => audit_directory(&cfg, dir, out)?,
        Command::CheckLemmas { fields, n, c0 } => check_lemmas(&cfg, *fields, *n, *c0, out)?,
    };
    let summary = report.summary();
    print!("{summary}");
    fs::write(out.join("summary.txt"), &summary).map_err(|e| Failure::Abort(e.into()))?;
    Ok(report.passed())
}

fn experiment(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentReport, Failure> {
    cfg.validate()?;
    let mut rec = FileRecorder::new(out, cfg.kind == ExperimentKind::Simulate)?;
    let result = run_experiment(cfg, &mut rec);
    rec.finish()?;
    let report = result?;
    output::write_report(&report, out)?;
    Ok(report)
}

fn audit_directory(
    cfg: &ExperimentConfig,
    dir: &Path,
    out: &Path,
) -> Result<ExperimentReport, Failure> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))
        .map_err(Failure::Config)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == output::SNAPSHOT_EXT))
        .collect();
    files.sort();
    let mut states = Vec::with_capacity(files.len());
    for f in &files {
        let mut r =
            std::io::BufReader::new(fs::File::open(f).map_err(|e| Failure::Abort(e.into()))?);
        let (s, t) = read_state(&mut r)?;
        states.push((t, s));
    }
    states.sort_by(|a, b| a.0.total_cmp(&b.0));
    let c = Coeffs::new(cfg.params)?;
    let (rep, fits) = audit(&c, &cfg.audit, &states)?;
    let mut report = ExperimentReport {
        kind: ExperimentKind::EnergyAudit,
        c0: Some(cfg.audit.c0),
        ..Default::default()
    };
    push_audit_checks(&mut report.checks, &rep, &fits);
    report.energy = Some(rep);
    report.gronwall = fits;
    output::write_report(&report, out)?;
    Ok(report)
}

fn check_lemmas(
    cfg: &ExperimentConfig,
    fields: usize,
    n: usize,
    c0: f64,
    out: &Path,
) -> Result<ExperimentReport, Failure> {
    let grid = Grid::cube(n, 4.0 * std::f64::consts::PI)?;
    let split = FrequencySplit::new(c0)?;
    let bern = bernstein_sweep(
        grid,
        &split,
        &[(1, 0), (2, 1), (3, 1)],
        fields,
        cfg.seed.unwrap_or(0),
    )?;
    let ts = log_times(40, 1.0, 1e4);
    let conv = convolution_sweep(&[(2.5, 1.5), (3.5, 0.5)], &ts)?;
    write_csv(
        &out.join("bernstein.csv"),
        &["field", "m1", "m2", "margin"],
        bern.iter().map(|r| {
            vec![
                r.field.to_string(),
                r.m1.to_string(),
                r.m2.to_string(),
                r.value.to_string(),
            ]
        }),
    )?;
    write_csv(
        &out.join("convolution.csv"),
        &["a", "b", "t", "ratio", "bound"],
        conv.iter().map(|r| {
            [r.a, r.b, r.t, r.ratio, r.bound]
                .map(|v| v.to_string())
                .to_vec()
        }),
    )?;
    Ok(ExperimentReport {
        checks: lemma_checks(&bern, &conv),
        ..Default::default()
    })
}
