//! CSV and JSON emission.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::scan::CrossingReport;
use crate::error::{Error, Result};
use crate::spectral::EigenFlow;

pub const CROSSING_HEADER: &str = "t_star,dim_C,dim_R,signature,form_volume,form_boundary,slope";

fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.16e}")
    }
}

/// One row per kernel direction at each crossing.
pub fn crossings_csv(report: &CrossingReport) -> String {
    let mut out = String::from(CROSSING_HEADER);
    out.push('\n');
    for c in &report.crossings {
        let rows = c.form_volume.len().max(c.slopes.len()).max(1);
        for i in 0..rows {
            let vol = c.form_volume.get(i).copied().unwrap_or(f64::NAN);
            let bdy = c.form_boundary.as_ref().and_then(|b| b.get(i).copied()).unwrap_or(f64::NAN);
            let slope = c.slopes.get(i).copied().unwrap_or(f64::NAN);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                num(c.t_star),
                c.dim_c,
                c.dim_r,
                c.signature,
                num(vol),
                num(bdy),
                num(slope)
            );
        }
    }
    out
}

/// `t,lambda` for a single tracked curve.
pub fn curve_csv(flow: &EigenFlow, j: usize) -> String {
    let mut out = String::from("t,lambda\n");
    for (t, l) in flow.t.iter().zip(&flow.curves[j]) {
        let _ = writeln!(out, "{},{}", num(*t), num(*l));
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Writes `<prefix>_crossings.csv` and one `<prefix>_curves/curve_NNN.csv` per
/// tracked eigenvalue curve; returns the paths written.
pub fn write_scan(dir: &Path, prefix: &str, report: &CrossingReport) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    let csv = dir.join(format!("{prefix}_crossings.csv"));
    write(&csv, &crossings_csv(report))?;
    paths.push(csv);
    let curves = dir.join(format!("{prefix}_curves"));
    for j in 0..report.flow.n_curves() {
        let p = curves.join(format!("curve_{j:03}.csv"));
        write(&p, &curve_csv(&report.flow, j))?;
        paths.push(p);
    }
    Ok(paths)
}

/// Writes `<prefix>_<name>.json`.
pub fn write_json<T: Serialize>(dir: &Path, prefix: &str, name: &str, value: &T) -> Result<PathBuf> {
    let p = dir.join(format!("{prefix}_{name}.json"));
    write(&p, &to_json(value)?)?;
    Ok(p)
}
