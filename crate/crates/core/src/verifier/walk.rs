//! Four-segment Maslov ledger around the rectangle `[λ_∞, 0] × [τ, 1]`.

use serde::Serialize;

use super::scan::CrossingReport;
use crate::error::{Error, Result};
use crate::potential::PotentialSpec;

/// Realified Maslov contributions of the four sides.
#[derive(Debug, Clone, Serialize)]
pub struct WalkReport {
    /// `λ ∈ [λ_∞, 0]` at `t = τ`, traversed toward 0.
    pub sigma1: i64,
    /// `t ∈ [τ, 1]` at `λ = 0`.
    pub sigma2: i64,
    /// `λ ∈ [λ_∞, 0]` at `t = 1`, traversed away from 0.
    pub sigma3: i64,
    /// `t ∈ [τ, 1]` at `λ = λ_∞`.
    pub sigma4: i64,
    pub total: i64,
    pub lambda_inf: f64,
    /// Lowest eigenvalue seen along the scan grid.
    pub min_eigenvalue: f64,
    pub sigma4_clear: bool,
    pub ledger: String,
    pub pass: bool,
}

/// Builds the ledger from a completed scan.
pub fn rectangle_walk(scan: &CrossingReport, v: &PotentialSpec) -> Result<WalkReport> {
    let lambda_inf = -v.sup_norm()? - 1.0;
    let min_eigenvalue = scan.flow.curves.iter().flat_map(|c| c.iter().copied()).fold(f64::INFINITY, f64::min);
    let sigma4_clear = min_eigenvalue > lambda_inf;
    let per_real = (2 / scan.field_factor()) as i64;
    let sigma1 = -(scan.morse_tau as i64) * per_real;
    let sigma2 = scan.maslov;
    let sigma3 = scan.morse_one as i64 * per_real;
    let sigma4 = 0;
    let total = sigma1 + sigma2 + sigma3 + sigma4;
    let ledger = format!(
        "Σ1 = {sigma1}, Σ2 = {sigma2}, Σ3 = {sigma3}, Σ4 = {sigma4} (λ_∞ = {lambda_inf:.6}, min eigenvalue {min_eigenvalue:.6})"
    );
    let pass = total == 0 && sigma4_clear;
    Ok(WalkReport { sigma1, sigma2, sigma3, sigma4, total, lambda_inf, min_eigenvalue, sigma4_clear, ledger, pass })
}

/// As [`rectangle_walk`], failing with the ledger when the total is nonzero.
pub fn rectangle_walk_checked(scan: &CrossingReport, v: &PotentialSpec) -> Result<WalkReport> {
    let w = rectangle_walk(scan, v)?;
    if !w.pass {
        return Err(Error::SumViolation { total: w.total, ledger: w.ledger });
    }
    Ok(w)
}
