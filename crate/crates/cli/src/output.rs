use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use oldroyd_core::decay::{driven_target, lowfreq_target, ExperimentKind, ExperimentReport};
use oldroyd_core::energy::EnergyRow;
use oldroyd_core::solver::{write_state, MonitorRow, Recorder, Snapshot};
use oldroyd_core::Error;

use crate::Failure;

pub const SNAPSHOT_EXT: &str = "obsf";

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Shortest round-trip text, in exponent form outside `[1e-4, 1e6)`.
fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) || !a.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Writes a CSV file with a fixed header.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<(), Failure>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(Failure::Abort)?;
    let run = |w: &mut csv::Writer<File>| -> csv::Result<()> {
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
        Ok(())
    };
    run(&mut w)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Abort)
}

/// Streams monitor rows to `monitor.csv` and snapshots to `snapshots/`.
pub struct FileRecorder {
    monitor: Option<csv::Writer<File>>,
    snapshots: Option<PathBuf>,
}

impl FileRecorder {
    pub fn new(out: &Path, enabled: bool) -> Result<Self, Failure> {
        if !enabled {
            return Ok(FileRecorder {
                monitor: None,
                snapshots: None,
            });
        }
        let path = out.join("monitor.csv");
        let mut w = csv::Writer::from_path(&path)
            .with_context(|| format!("creating {}", path.display()))
            .map_err(Failure::Abort)?;
        w.write_record(&MonitorRow::HEADER[..10])
            .map_err(|e| Failure::Abort(e.into()))?;
        let dir = out.join("snapshots");
        fs::create_dir_all(&dir).map_err(|e| Failure::Abort(e.into()))?;
        Ok(FileRecorder {
            monitor: Some(w),
            snapshots: Some(dir),
        })
    }

    pub fn finish(&mut self) -> Result<(), Failure> {
        if let Some(w) = &mut self.monitor {
            w.flush().map_err(|e| Failure::Abort(e.into()))?;
        }
        Ok(())
    }
}

impl Recorder for FileRecorder {
    fn monitor(&mut self, r: &MonitorRow) -> oldroyd_core::Result<()> {
        let Some(w) = &mut self.monitor else {
            return Ok(());
        };
        let mut rec: Vec<String> = [r.t, r.min_rho, r.min_eta, r.mean_rho, r.mean_eta]
            .into_iter()
            .chain(r.l2)
            .map(num)
            .collect();
        rec.push(r.equivalence_defect.map(num).unwrap_or_default());
        w.write_record(&rec).map_err(io_err)?;
        w.flush()?;
        Ok(())
    }

    fn snapshot(&mut self, s: &Snapshot) -> oldroyd_core::Result<()> {
        let Some(dir) = &self.snapshots else {
            return Ok(());
        };
        let path = dir.join(format!("snap_{:06}.{SNAPSHOT_EXT}", s.step));
        let mut w = BufWriter::new(File::create(path)?);
        write_state(&mut w, &s.state, s.t)?;
        w.flush()?;
        Ok(())
    }
}

fn target(kind: ExperimentKind, m: u32) -> Option<f64> {
    match kind {
        ExperimentKind::LinearDecay => Some(lowfreq_target(m)),
        ExperimentKind::DrivenTau if m <= 2 => Some(driven_target(m)),
        _ => None,
    }
}

fn order(label: &str) -> u32 {
    label
        .rsplit_once("_m")
        .and_then(|(_, m)| m.parse().ok())
        .unwrap_or(0)
}

/// Writes every table the report carries.
pub fn write_report(rep: &ExperimentReport, out: &Path) -> Result<(), Failure> {
    if let Some(scan) = &rep.scan {
        write_csv(
            &out.join("scan.csv"),
            &[
                "r",
                "min_re_eig4",
                "min_re_eig2",
                "kappa4",
                "kappa2",
                "certified",
            ],
            scan.rows.iter().map(|r| {
                let mut v: Vec<String> = [r.r, r.min_re_eig4, r.min_re_eig2, r.kappa4, r.kappa2]
                    .map(num)
                    .to_vec();
                v.push(u8::from(r.certified).to_string());
                v
            }),
        )?;
    }
    for s in &rep.series {
        write_csv(
            &out.join(format!("{}.csv", s.label)),
            &["t", "norm", "fitted_slope_so_far"],
            (0..s.t.len()).map(|i| {
                vec![
                    num(s.t[i]),
                    num(s.values[i]),
                    s.running_slope(i).map(num).unwrap_or_default(),
                ]
            }),
        )?;
    }
    if !rep.series.is_empty() {
        write_csv(
            &out.join("slopes.csv"),
            &["series", "order", "slope", "stderr", "target", "samples"],
            rep.series.iter().map(|s| {
                let m = order(&s.label);
                let f = s.fit.expect("fitted series");
                vec![
                    s.label.clone(),
                    m.to_string(),
                    num(f.slope),
                    num(f.stderr),
                    target(rep.kind, m).map(num).unwrap_or_default(),
                    f.samples.to_string(),
                ]
            }),
        )?;
    }
    if let Some(e) = &rep.energy {
        write_csv(
            &out.join("energy.csv"),
            &EnergyRow::HEADER,
            e.rows.iter().map(|r| {
                let mut v: Vec<String> = std::iter::once(r.t)
                    .chain(r.h)
                    .chain(r.n)
                    .chain(r.residual)
                    .map(num)
                    .collect();
                v.push(r.flags.to_string());
                v
            }),
        )?;
    }
    if !rep.gronwall.is_empty() {
        write_csv(
            &out.join("gronwall.csv"),
            &["level", "c2", "c"],
            rep.gronwall
                .iter()
                .enumerate()
                .map(|(l, f)| vec![(l + 1).to_string(), num(f.c2), num(f.c)]),
        )?;
    }
    Ok(())
}
