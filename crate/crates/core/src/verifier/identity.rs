//! Morse–Maslov identities and the small-`τ` selection they rely on.

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::scan::{scan_conjugate_points, CrossingReport, ScanSettings};
use super::walk::{rectangle_walk, WalkReport};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::potential::PotentialSpec;
use crate::shooting::{self, Route};
use crate::spectral::{assemble, eigenvalues, BasisSpec, BoundaryCondition, Field};

pub const SCHEMA_VERSION: u32 = 1;
const TAU_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    QuasiPeriodic,
    QuasiPeriodicIii,
    QuasiPeriodicIv,
    Periodic,
    PeriodicIii,
    PeriodicIv,
    Dirichlet,
    DirichletSum,
    Neumann,
    SmallTauMorse,
}

/// Sign required of every crossing form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FormSign {
    Positive,
    Negative,
}

impl Identity {
    pub const ALL: [Identity; 10] = [
        Identity::QuasiPeriodic,
        Identity::QuasiPeriodicIii,
        Identity::QuasiPeriodicIv,
        Identity::Periodic,
        Identity::PeriodicIii,
        Identity::PeriodicIv,
        Identity::Dirichlet,
        Identity::DirichletSum,
        Identity::Neumann,
        Identity::SmallTauMorse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::QuasiPeriodic => "quasi_periodic",
            Identity::QuasiPeriodicIii => "quasi_periodic_iii",
            Identity::QuasiPeriodicIv => "quasi_periodic_iv",
            Identity::Periodic => "periodic",
            Identity::PeriodicIii => "periodic_iii",
            Identity::PeriodicIv => "periodic_iv",
            Identity::Dirichlet => "dirichlet",
            Identity::DirichletSum => "dirichlet_sum",
            Identity::Neumann => "neumann",
            Identity::SmallTauMorse => "small_tau_morse",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Identity::QuasiPeriodic => "2 Mor = -Mas",
            Identity::QuasiPeriodicIii => "Mor = 0",
            Identity::QuasiPeriodicIv => "Mor = sum_{tau<=t<1} dim ker",
            Identity::Periodic => "2 Mor - 2 Mor(V(0)) = -Mas",
            Identity::PeriodicIii => "Mor - Mor(V(0)) = -sum_{tau<t<=1} dim ker",
            Identity::PeriodicIv => "Mor - Mor(V(0)) = sum_{tau<=t<1} dim ker",
            Identity::Dirichlet => "2 Mor = -Mas",
            Identity::DirichletSum => "Mor = sum_{tau<=t<1} dim ker",
            Identity::Neumann => "2 Mor = -Mas + 2 Mor(V(0))",
            Identity::SmallTauMorse => "Mor(tau) = Mor(V(0)), 0 not in spectrum",
        }
    }

    /// Whether the identity is stated for this boundary condition.
    pub fn applies_to(self, bc: &BoundaryCondition) -> bool {
        match self {
            Identity::QuasiPeriodic | Identity::QuasiPeriodicIii | Identity::QuasiPeriodicIv => {
                matches!(bc, BoundaryCondition::Theta(_)) && !bc.is_periodic()
            }
            Identity::Periodic | Identity::PeriodicIii | Identity::PeriodicIv | Identity::SmallTauMorse => {
                bc.is_periodic()
            }
            Identity::Dirichlet | Identity::DirichletSum => matches!(bc, BoundaryCondition::Dirichlet),
            Identity::Neumann => matches!(bc, BoundaryCondition::Neumann),
        }
    }

    fn form_sign(self) -> Option<FormSign> {
        match self {
            Identity::QuasiPeriodicIii | Identity::PeriodicIii => Some(FormSign::Positive),
            Identity::QuasiPeriodicIv | Identity::PeriodicIv => Some(FormSign::Negative),
            _ => None,
        }
    }
}

impl std::fmt::Display for Identity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub identity: Identity,
    pub statement: &'static str,
    pub lhs: i64,
    pub rhs: i64,
    pub pass: bool,
}

/// Maslov index of the one-dimensional trace path by both routes.
#[derive(Debug, Clone, Serialize)]
pub struct RouteAgreement {
    pub spectral_flow: i64,
    pub crossing_forms: i64,
    pub agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub tau: f64,
    pub morse_c: usize,
    pub origin_morse: usize,
    pub maslov: i64,
    pub routes: Option<RouteAgreement>,
    pub identities: Vec<IdentityCheck>,
    pub walk: WalkReport,
    pub scan: CrossingReport,
    pub pass: bool,
}

/// Whether `V(0)` Morse data sets the small-`τ` target.
fn origin_target(bc: &BoundaryCondition) -> bool {
    bc.is_periodic() || matches!(bc, BoundaryCondition::Neumann)
}

fn morse_at(basis: &BasisSpec, v: &PotentialSpec, tau: f64, eps_ker: Option<f64>) -> Option<(usize, usize)> {
    let op = assemble(basis, v, tau, 0.0).ok()?;
    let mut r = eigenvalues(&op).ok()?;
    if let Some(e) = eps_ker {
        r = r.with_eps_ker(e);
    }
    Some((r.morse_index().ok()?, r.kernel_dim()))
}

/// Halves `τ` from `tau0` until the Morse index at `τ` reaches its small-`τ`
/// value with `0` outside the spectrum; stops at the floor.
pub fn choose_tau(basis: &BasisSpec, v: &PotentialSpec, tau0: f64, eps_ker: Option<f64>) -> Result<f64> {
    let factor = if basis.field() == Field::Realified { 2 } else { 1 };
    let target = if origin_target(basis.bc()) { v.origin_morse()? * factor } else { 0 };
    let ok = |tau: f64| matches!(morse_at(basis, v, tau, eps_ker), Some((mor, 0)) if mor == target);
    let mut tau = tau0;
    while tau >= TAU_FLOOR {
        if ok(tau) && (!origin_target(basis.bc()) || ok(tau / 2.0)) {
            return Ok(tau);
        }
        tau /= 2.0;
    }
    Ok(tau0)
}

/// Scan, walk and Maslov data shared by every identity of one configuration.
pub struct Prepared {
    pub tau: f64,
    pub scan: CrossingReport,
    pub walk: WalkReport,
    pub routes: Option<RouteAgreement>,
    pub maslov: i64,
}

pub fn prepare(cfg: &ExperimentConfig, exec: &Execution) -> Result<Prepared> {
    let basis = cfg.basis()?;
    let v = &cfg.potential;
    let tau = if cfg.auto_tau { choose_tau(&basis, v, cfg.tau, cfg.eps_ker)? } else { cfg.tau };
    let settings = ScanSettings {
        tau,
        t_points: cfg.t_points,
        eps_ker: cfg.eps_ker,
        eps_form: cfg.eps_form,
        t_tol: cfg.t_tol,
        shooting: cfg.shooting,
    };
    let scan = scan_conjugate_points(&basis, v, &settings, exec)?;
    let walk = rectangle_walk(&scan, v)?;
    let (routes, maslov) = if cfg.lattice.dim() == 1 && cfg.shooting {
        let sf = shooting::maslov_1d(v, &cfg.bc, tau, Route::SpectralFlow)?.maslov;
        let cf = shooting::maslov_1d(v, &cfg.bc, tau, Route::CrossingForms)?.maslov;
        (Some(RouteAgreement { spectral_flow: sf, crossing_forms: cf, agree: sf == cf }), cf)
    } else {
        (None, scan.maslov)
    };
    Ok(Prepared { tau, scan, walk, routes, maslov })
}

fn check_hypothesis(identity: Identity, scan: &CrossingReport) -> Result<()> {
    let Some(sign) = identity.form_sign() else { return Ok(()) };
    for c in &scan.crossings {
        let bad = match sign {
            FormSign::Positive => c.n_minus > 0,
            FormSign::Negative => c.n_plus > 0,
        };
        if bad {
            return Err(Error::HypothesisViolation(
                identity.name().into(),
                format!("crossing form at t = {} has signature {}", c.t_star, c.signature),
            ));
        }
    }
    Ok(())
}

/// Evaluates one identity on prepared data.
pub fn evaluate(identity: Identity, cfg: &ExperimentConfig, p: &Prepared) -> Result<IdentityCheck> {
    if !identity.applies_to(&cfg.bc) {
        return Err(Error::config(
            "solver.identity",
            format!("{identity} does not apply to boundary condition {}", cfg.bc.label()),
        ));
    }
    let scan = &p.scan;
    if identity != Identity::SmallTauMorse {
        if let Some(c) = scan.crossings.iter().find(|c| !c.regular) {
            return Err(Error::UnresolvedCrossing { t: c.t_star, reason: "crossing form is degenerate".into() });
        }
        check_hypothesis(identity, scan)?;
    }
    let mor = scan.morse_one_c() as i64;
    let mor0 = scan.origin_morse as i64;
    let mas = p.maslov;
    let lower = scan.dim_sum(true, false) as i64;
    let upper = scan.dim_sum(false, true) as i64;
    let (lhs, rhs, extra) = match identity {
        Identity::QuasiPeriodic | Identity::Dirichlet => (2 * mor, -mas, true),
        Identity::QuasiPeriodicIii => (mor, 0, true),
        Identity::QuasiPeriodicIv | Identity::DirichletSum => (mor, lower, true),
        Identity::Periodic => (2 * mor - 2 * mor0, -mas, true),
        Identity::PeriodicIii => (mor - mor0, -upper, true),
        Identity::PeriodicIv => (mor - mor0, lower, true),
        Identity::Neumann => (2 * mor, -mas + 2 * mor0, true),
        Identity::SmallTauMorse => (scan.morse_tau_c() as i64, mor0, scan.kernel_tau == 0),
    };
    Ok(IdentityCheck { identity, statement: identity.statement(), lhs, rhs, pass: extra && lhs == rhs })
}

fn assemble_report(p: Prepared, identities: Vec<IdentityCheck>) -> VerificationReport {
    let routes_ok = p.routes.as_ref().is_none_or(|r| r.agree);
    let pass = routes_ok && p.walk.pass && identities.iter().all(|c| c.pass);
    VerificationReport {
        schema_version: SCHEMA_VERSION,
        tau: p.tau,
        morse_c: p.scan.morse_one_c(),
        origin_morse: p.scan.origin_morse,
        maslov: p.maslov,
        routes: p.routes,
        identities,
        walk: p.walk,
        scan: p.scan,
        pass,
    }
}

/// Verifies a single identity.
pub fn verify_identity(cfg: &ExperimentConfig, identity: Identity, exec: &Execution) -> Result<VerificationReport> {
    if !identity.applies_to(&cfg.bc) {
        return Err(Error::config(
            "solver.identity",
            format!("{identity} does not apply to boundary condition {}", cfg.bc.label()),
        ));
    }
    let p = prepare(cfg, exec)?;
    let check = evaluate(identity, cfg, &p)?;
    Ok(assemble_report(p, vec![check]))
}

/// Verifies every identity stated for the configured boundary condition.
pub fn verify_all(cfg: &ExperimentConfig, exec: &Execution) -> Result<VerificationReport> {
    let p = prepare(cfg, exec)?;
    let mut checks = Vec::new();
    for id in Identity::ALL.into_iter().filter(|id| id.applies_to(&cfg.bc)) {
        match evaluate(id, cfg, &p) {
            Ok(c) => checks.push(c),
            Err(Error::HypothesisViolation(..)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(assemble_report(p, checks))
}
