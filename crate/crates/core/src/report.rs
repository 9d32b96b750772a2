//! CSV and JSON writers. Numbers are printed with 17 significant digits so
//! every value round-trips exactly.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::bounds::BoundReport;
use crate::error::Result;
use crate::markov::{FiniteKernel, Trajectory};
use crate::montecarlo::{SllnTable, VarianceOutcome};

/// Round-trip formatting: `d.dddddddddddddddde±x`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Columns `n, estimate, stderr, bound_name, bound, margin, pass`, one row per bound.
pub fn write_variance_csv<W: Write>(out: W, outcome: &VarianceOutcome) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "estimate", "stderr", "bound_name", "bound", "margin", "pass"])?;
    for r in &outcome.reports {
        for b in &r.bounds {
            w.write_record([
                r.n.to_string(),
                opt(r.l2),
                opt(r.stderr),
                b.name.clone(),
                num(b.value),
                opt(b.margin),
                b.pass.map(|p| p.to_string()).unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Columns `n, m, bound_name, value, empirical_l2, margin, provenance`.
pub fn write_bounds_csv<W: Write>(out: W, reports: &[BoundReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "m", "bound_name", "value", "empirical_l2", "margin", "provenance"])?;
    for r in reports {
        for b in &r.bounds {
            w.write_record([
                r.n.to_string(),
                r.m.to_string(),
                b.name.clone(),
                num(b.value),
                opt(r.l2),
                opt(b.margin),
                b.provenance.clone(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Columns `n, u_n, target, abs_error`.
pub fn write_slln_csv<W: Write>(out: W, table: &SllnTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "u_n", "target", "abs_error"])?;
    for r in &table.rows {
        w.write_record([r.n.to_string(), num(r.u_n), num(r.target), num(r.abs_error)])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `i, state, value`: time, state index and state label.
pub fn write_trajectory_csv<W: Write>(out: W, traj: &Trajectory, kernel: &FiniteKernel) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["i", "state", "value"])?;
    for (i, &y) in traj.values.iter().enumerate() {
        w.write_record([(i + 1).to_string(), y.to_string(), num(kernel.states()[y])])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n")?;
    Ok(())
}

pub fn write_csv_file(path: &Path, write: impl FnOnce(std::fs::File) -> Result<()>) -> Result<()> {
    write(std::fs::File::create(path)?)
}
