use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{c64, cx};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    /// `u(x + a_j) = e^{2πiθ_j} u(x)` with the matching derivative condition.
    Theta(Vec<f64>),
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    pub fn periodic(n: usize) -> Self {
        BoundaryCondition::Theta(vec![0.0; n])
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, BoundaryCondition::Theta(th) if th.iter().all(|&x| x == 0.0))
    }

    pub fn label(&self) -> String {
        match self {
            BoundaryCondition::Theta(th) => format!("theta{th:?}"),
            BoundaryCondition::Dirichlet => "dirichlet".into(),
            BoundaryCondition::Neumann => "neumann".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Complex,
    Realified,
}

/// Truncated eigenbasis of the Laplacian on the cell.
///
/// Theta modes are `|Q|^{-1/2} e^{iAᵀ(θ-k)·x}` for `|k_j| ≤ K`. Dirichlet and
/// Neumann modes are sine and cosine products on a rectangular cell with
/// `1 ≤ k_j ≤ K` and `0 ≤ k_j ≤ K` respectively. Coefficient vectors are
/// ordered mode-major, block index minor; realified vectors interleave the
/// real and imaginary parts of each complex coefficient.
#[derive(Debug, Clone)]
pub struct BasisSpec {
    lattice: Lattice,
    bc: BoundaryCondition,
    truncation: usize,
    m: usize,
    field: Field,
    modes: Vec<Vec<i64>>,
    sides: Option<Vec<f64>>,
}

fn index_box(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for v in lo..=hi {
                let mut p2 = p.clone();
                p2.push(v);
                next.push(p2);
            }
        }
        out = next;
    }
    out
}

impl BasisSpec {
    pub fn new(lattice: &Lattice, bc: BoundaryCondition, truncation: usize, m: usize, field: Field) -> Result<Self> {
        let n = lattice.dim();
        let k = truncation as i64;
        if m == 0 {
            return Err(Error::DimensionMismatch("block size must be positive".into()));
        }
        let (modes, sides) = match &bc {
            BoundaryCondition::Theta(th) => {
                if th.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "theta has {} entries, lattice dimension {n}",
                        th.len()
                    )));
                }
                if th.iter().any(|&x| !(0.0..1.0).contains(&x)) {
                    return Err(Error::DimensionMismatch("theta must lie in [0,1)^n".into()));
                }
                (index_box(n, -k, k), None)
            }
            BoundaryCondition::Dirichlet | BoundaryCondition::Neumann => {
                let sides = lattice.rectangular_sides().ok_or_else(|| {
                    Error::UnsupportedLattice("Dirichlet and Neumann bases need a rectangular cell".into())
                })?;
                let lo = if bc == BoundaryCondition::Dirichlet { 1 } else { 0 };
                if k < lo {
                    return Err(Error::DimensionMismatch("truncation leaves no modes".into()));
                }
                (index_box(n, lo, k), Some(sides))
            }
        };
        Ok(BasisSpec { lattice: lattice.clone(), bc, truncation, m, field, modes, sides })
    }

    pub fn with_field(&self, field: Field) -> Self {
        BasisSpec { field, ..self.clone() }
    }

    pub fn with_truncation(&self, truncation: usize) -> Result<Self> {
        BasisSpec::new(&self.lattice, self.bc.clone(), truncation, self.m, self.field)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn bc(&self) -> &BoundaryCondition {
        &self.bc
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn modes(&self) -> &[Vec<i64>] {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    /// Complex dimension `#modes · m`.
    pub fn complex_dim(&self) -> usize {
        self.modes.len() * self.m
    }

    /// Dimension of the assembled matrix.
    pub fn dim(&self) -> usize {
        match self.field {
            Field::Complex => self.complex_dim(),
            Field::Realified => 2 * self.complex_dim(),
        }
    }

    /// Scalar multiplicity of each Laplace eigenvalue in the assembled matrix.
    pub fn block_multiplicity(&self) -> usize {
        match self.field {
            Field::Complex => self.m,
            Field::Realified => 2 * self.m,
        }
    }

    /// Laplace eigenvalue of the given mode.
    pub fn laplace_eigenvalue(&self, mode: &[i64]) -> f64 {
        match (&self.bc, &self.sides) {
            (BoundaryCondition::Theta(th), _) => self.lattice.laplace_eigenvalue(th, mode),
            (_, Some(sides)) => mode.iter().zip(sides).map(|(&k, l)| (PI * k as f64 / l).powi(2)).sum(),
            _ => unreachable!(),
        }
    }

    /// Value and gradient of the mode function at `x`.
    pub fn mode_value(&self, mode: &[i64], x: &[f64]) -> (c64, Vec<c64>) {
        let n = x.len();
        match (&self.bc, &self.sides) {
            (BoundaryCondition::Theta(th), _) => {
                let d: Vec<f64> = th.iter().zip(mode).map(|(t, &k)| t - k as f64).collect();
                let xi = self.lattice.a_transpose_apply(&d);
                let ph: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
                let z = cx(ph.cos(), ph.sin()) / self.lattice.cell_volume().sqrt();
                (z, xi.iter().map(|&v| z * cx(0.0, v)).collect())
            }
            (bc, Some(sides)) => {
                let dirichlet = *bc == BoundaryCondition::Dirichlet;
                let mut f = vec![0.0; n];
                let mut g = vec![0.0; n];
                for j in 0..n {
                    let w = PI * mode[j] as f64 / sides[j];
                    let norm =
                        if dirichlet || mode[j] != 0 { (2.0 / sides[j]).sqrt() } else { (1.0 / sides[j]).sqrt() };
                    if dirichlet {
                        f[j] = norm * (w * x[j]).sin();
                        g[j] = norm * w * (w * x[j]).cos();
                    } else {
                        f[j] = norm * (w * x[j]).cos();
                        g[j] = -norm * w * (w * x[j]).sin();
                    }
                }
                let value: f64 = f.iter().product();
                let grad = (0..n)
                    .map(|l| {
                        let p: f64 = (0..n).map(|j| if j == l { g[j] } else { f[j] }).product();
                        cx(p, 0.0)
                    })
                    .collect();
                (cx(value, 0.0), grad)
            }
            _ => unreachable!(),
        }
    }

    /// Complex coefficient vector from an assembled-space vector.
    pub fn complex_coefficients(&self, v: &[c64]) -> Vec<c64> {
        match self.field {
            Field::Complex => v.to_vec(),
            Field::Realified => (0..self.complex_dim()).map(|i| cx(v[2 * i].re, v[2 * i + 1].re)).collect(),
        }
    }

    /// Evaluates `u(x)` and `∂_l u(x)` for the complex coefficient vector `c`.
    pub fn reconstruct(&self, c: &[c64], x: &[f64]) -> (Vec<c64>, Vec<Vec<c64>>) {
        let n = x.len();
        let m = self.m;
        let mut u = vec![cx(0.0, 0.0); m];
        let mut du = vec![vec![cx(0.0, 0.0); m]; n];
        for (i, mode) in self.modes.iter().enumerate() {
            let (f, g) = self.mode_value(mode, x);
            for a in 0..m {
                let z = c[i * m + a];
                if z == cx(0.0, 0.0) {
                    continue;
                }
                u[a] += z * f;
                for l in 0..n {
                    du[l][a] += z * g[l];
                }
            }
        }
        (u, du)
    }
}
