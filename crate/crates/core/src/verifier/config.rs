//! Experiment configuration.
//!
//! ```toml
//! [lattice]
//! basis = [[1.0]]
//!
//! [potential]
//! kind = "fourier"          # "constant" or "fourier"
//! m = 1
//! value = [[-50.0]]         # constant part (required for "constant")
//! coefficients = [ { q = [1], re = [[-5.0]] }, { q = [-1], re = [[-5.0]] } ]
//!
//! [bc]
//! kind = "theta"            # "theta", "dirichlet" or "neumann"
//! theta = [0.25]
//!
//! [solver]
//! field = "complex"         # or "realified"
//! truncation = 64
//! tau = 0.05
//! t_points = 200
//! auto_tau = true
//! identity = "quasi_periodic"
//! seed = 0
//!
//! [tolerances]
//! eps_form = 1e-6
//! t_tol = 1e-10
//!
//! [output]
//! dir = "out"
//! prefix = "run"
//! ```
//!
//! Every key can be overridden with `section.key=value`, the value written
//! in TOML syntax.

use std::path::{Path, PathBuf};

use faer::Mat;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use super::identity::Identity;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::cx;
use crate::potential::{FourierTerm, PotentialSpec};
use crate::spectral::{BasisSpec, BoundaryCondition, Field};

const SECTIONS: &[(&str, &[&str])] = &[
    ("lattice", &["basis"]),
    ("potential", &["kind", "m", "value", "coefficients"]),
    ("bc", &["kind", "theta"]),
    ("solver", &["field", "truncation", "tau", "t_points", "auto_tau", "identity", "seed", "shooting"]),
    ("tolerances", &["eps_ker", "eps_form", "t_tol"]),
    ("output", &["dir", "prefix"]),
];

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Coefficient {
    q: Vec<i64>,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub lattice: Lattice,
    pub potential: PotentialSpec,
    pub bc: BoundaryCondition,
    pub field: Field,
    pub truncation: usize,
    pub tau: f64,
    pub t_points: usize,
    pub auto_tau: bool,
    pub identity: Option<Identity>,
    pub seed: u64,
    /// Use shooting kernels for one-dimensional crossing forms.
    pub shooting: bool,
    pub eps_ker: Option<f64>,
    pub eps_form: f64,
    pub t_tol: f64,
    pub output_dir: PathBuf,
    pub prefix: String,
    /// The resolved document, echoed into reports.
    pub source: Table,
}

fn field_err(field: &str, e: impl std::fmt::Display) -> Error {
    Error::config(field, e.to_string())
}

fn get<T: DeserializeOwned>(doc: &Table, section: &str, key: &str) -> Result<Option<T>> {
    let field = format!("{section}.{key}");
    let Some(sec) = doc.get(section) else { return Ok(None) };
    let Some(v) = sec.get(key) else { return Ok(None) };
    v.clone().try_into::<T>().map(Some).map_err(|e| field_err(&field, e))
}

fn require<T: DeserializeOwned>(doc: &Table, section: &str, key: &str) -> Result<T> {
    get(doc, section, key)?.ok_or_else(|| Error::config(format!("{section}.{key}"), "missing"))
}

fn matrix(rows: &[Vec<f64>], m: usize, field: &str) -> Result<Mat<f64>> {
    if rows.len() != m || rows.iter().any(|r| r.len() != m) {
        return Err(Error::config(field, format!("expected a {m}x{m} matrix")));
    }
    Ok(Mat::from_fn(m, m, |i, j| rows[i][j]))
}

/// Applies `section.key=value` to a parsed document.
pub fn apply_override(doc: &mut Table, assignment: &str) -> Result<()> {
    let (path, raw) =
        assignment.split_once('=').ok_or_else(|| Error::config(assignment, "override must read section.key=value"))?;
    let (section, key) =
        path.trim().split_once('.').ok_or_else(|| Error::config(path, "override key must be section.key"))?;
    let value = match format!("v = {}", raw.trim()).parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or(Value::String(raw.trim().into())),
        Err(_) => Value::String(raw.trim().into()),
    };
    let sec = doc.entry(section.to_string()).or_insert_with(|| Value::Table(Table::new()));
    match sec {
        Value::Table(t) => {
            t.insert(key.to_string(), value);
            Ok(())
        }
        _ => Err(Error::config(section, "is not a table")),
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path, overrides: &[String]) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        ExperimentConfig::from_str_with(&text, overrides)
    }

    pub fn from_str_with(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: Table = text.parse().map_err(|e: toml::de::Error| Error::config("config", e.message()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        ExperimentConfig::from_table(doc)
    }

    pub fn from_table(doc: Table) -> Result<Self> {
        for (name, value) in &doc {
            let Some((_, keys)) = SECTIONS.iter().find(|(s, _)| s == name) else {
                return Err(Error::config(name, "unknown section"));
            };
            let Value::Table(t) = value else { return Err(Error::config(name, "must be a table")) };
            if let Some(k) = t.keys().find(|k| !keys.contains(&k.as_str())) {
                return Err(Error::config(format!("{name}.{k}"), "unknown key"));
            }
        }

        let basis: Vec<Vec<f64>> = require(&doc, "lattice", "basis")?;
        let lattice = Lattice::new(basis).map_err(|e| field_err("lattice.basis", e))?;
        let n = lattice.dim();

        let kind: String = require(&doc, "potential", "kind")?;
        let m: usize = require(&doc, "potential", "m")?;
        if m == 0 {
            return Err(Error::config("potential.m", "must be positive"));
        }
        let value: Option<Vec<Vec<f64>>> = get(&doc, "potential", "value")?;
        let coefficients: Vec<Coefficient> = get(&doc, "potential", "coefficients")?.unwrap_or_default();
        let potential = match kind.as_str() {
            "constant" => {
                let v = value.ok_or_else(|| Error::config("potential.value", "missing"))?;
                PotentialSpec::constant(&lattice, matrix(&v, m, "potential.value")?)
                    .map_err(|e| field_err("potential.value", e))?
            }
            "fourier" => {
                let mut terms = Vec::new();
                if let Some(v) = value {
                    let c = matrix(&v, m, "potential.value")?;
                    terms.push(FourierTerm { q: vec![0; n], coeff: Mat::from_fn(m, m, |i, j| cx(c[(i, j)], 0.0)) });
                }
                for (i, c) in coefficients.iter().enumerate() {
                    let field = format!("potential.coefficients[{i}]");
                    if c.q.len() != n {
                        return Err(Error::config(field, format!("q must have {n} entries")));
                    }
                    let re = matrix(&c.re, m, &field)?;
                    let im = match &c.im {
                        Some(im) => matrix(im, m, &field)?,
                        None => Mat::zeros(m, m),
                    };
                    terms.push(FourierTerm {
                        q: c.q.clone(),
                        coeff: Mat::from_fn(m, m, |i, j| cx(re[(i, j)], im[(i, j)])),
                    });
                }
                PotentialSpec::fourier(&lattice, m, terms).map_err(|e| field_err("potential.coefficients", e))?
            }
            other => return Err(Error::config("potential.kind", format!("unknown kind `{other}`"))),
        };

        let bc_kind: String = require(&doc, "bc", "kind")?;
        let bc = match bc_kind.as_str() {
            "theta" => {
                let theta: Vec<f64> = get(&doc, "bc", "theta")?.unwrap_or_else(|| vec![0.0; n]);
                if theta.len() != n || theta.iter().any(|&x| !(0.0..1.0).contains(&x)) {
                    return Err(Error::config("bc.theta", format!("must hold {n} values in [0, 1)")));
                }
                BoundaryCondition::Theta(theta)
            }
            "periodic" => BoundaryCondition::periodic(n),
            "dirichlet" => BoundaryCondition::Dirichlet,
            "neumann" => BoundaryCondition::Neumann,
            other => return Err(Error::config("bc.kind", format!("unknown kind `{other}`"))),
        };
        if !matches!(bc, BoundaryCondition::Theta(_)) && lattice.rectangular_sides().is_none() {
            return Err(Error::config("bc.kind", "Dirichlet and Neumann need a rectangular cell"));
        }

        let field: Field = get(&doc, "solver", "field")?.unwrap_or(Field::Complex);
        let truncation: usize = get(&doc, "solver", "truncation")?.unwrap_or(if n == 1 { 64 } else { 16 });
        if truncation == 0 {
            return Err(Error::config("solver.truncation", "must be positive"));
        }
        let tau: f64 = get(&doc, "solver", "tau")?.unwrap_or(0.05);
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::config("solver.tau", "must lie in (0, 1)"));
        }
        let t_points: usize = get(&doc, "solver", "t_points")?.unwrap_or(if n == 1 { 200 } else { 60 });
        if t_points < 2 {
            return Err(Error::config("solver.t_points", "must be at least 2"));
        }
        let identity: Option<Identity> = get(&doc, "solver", "identity")?;
        let eps_ker: Option<f64> = get(&doc, "tolerances", "eps_ker")?;
        let eps_form: f64 = get(&doc, "tolerances", "eps_form")?.unwrap_or(1e-6);
        let t_tol: f64 = get(&doc, "tolerances", "t_tol")?.unwrap_or(1e-10);
        for (name, v) in [
            ("tolerances.eps_ker", eps_ker.unwrap_or(1.0)),
            ("tolerances.eps_form", eps_form),
            ("tolerances.t_tol", t_tol),
        ] {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::config(name, "must be positive"));
            }
        }
        Ok(ExperimentConfig {
            lattice,
            potential,
            bc,
            field,
            truncation,
            tau,
            t_points,
            auto_tau: get(&doc, "solver", "auto_tau")?.unwrap_or(true),
            identity,
            seed: get(&doc, "solver", "seed")?.unwrap_or(0),
            shooting: get(&doc, "solver", "shooting")?.unwrap_or(true),
            eps_ker,
            eps_form,
            t_tol,
            output_dir: PathBuf::from(get::<String>(&doc, "output", "dir")?.unwrap_or_else(|| "out".into())),
            prefix: get(&doc, "output", "prefix")?.unwrap_or_else(|| "morse_maslov".into()),
            source: doc,
        })
    }

    pub fn basis(&self) -> Result<BasisSpec> {
        BasisSpec::new(&self.lattice, self.bc.clone(), self.truncation, self.potential.m(), self.field)
    }

    /// Identity implied by the boundary condition when none is configured.
    pub fn default_identity(&self) -> Identity {
        match &self.bc {
            BoundaryCondition::Theta(_) if self.bc.is_periodic() => Identity::Periodic,
            BoundaryCondition::Theta(_) => Identity::QuasiPeriodic,
            BoundaryCondition::Dirichlet => Identity::Dirichlet,
            BoundaryCondition::Neumann => Identity::Neumann,
        }
    }
}
