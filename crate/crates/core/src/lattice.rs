//! Lattices, unit cells and quadrature grids.
//!
//! The cell `Q = {Σ s_j a_j : s ∈ [0,1]^n}` is anchored at the origin, so
//! `tQ ⊂ Q` for `t ∈ (0, 1]`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use faer::Mat;
use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    basis: Vec<Vec<f64>>,
    a: Vec<Vec<f64>>,
    volume: f64,
}

impl Lattice {
    /// Builds the lattice spanned by the given basis vectors `a_j`.
    pub fn new(basis: Vec<Vec<f64>>) -> Result<Self> {
        let n = basis.len();
        if n == 0 || basis.iter().any(|a| a.len() != n) {
            return Err(Error::DimensionMismatch(format!("expected {n} vectors of length {n}")));
        }
        let b = Mat::from_fn(n, n, |l, j| basis[j][l]);
        let det = b.determinant();
        let max_norm = basis.iter().map(|a| a.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max);
        let tol = 1e-12 * max_norm.powi(n as i32);
        if det.is_nan() || det.abs() < tol || max_norm == 0.0 {
            return Err(Error::SingularBasis { det: det.abs(), tol });
        }
        let inv = linalg::inverse_r(b.as_ref());
        let a = (0..n).map(|i| (0..n).map(|j| 2.0 * PI * inv[(i, j)]).collect()).collect();
        Ok(Lattice { basis, a, volume: det.abs() })
    }

    /// The integer lattice `Z^n` scaled by the given side lengths.
    pub fn rectangular(sides: &[f64]) -> Result<Self> {
        let n = sides.len();
        Lattice::new((0..n).map(|j| (0..n).map(|i| if i == j { sides[j] } else { 0.0 }).collect()).collect())
    }

    pub fn unit(n: usize) -> Self {
        Lattice::rectangular(&vec![1.0; n]).expect("unit lattice")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// The matrix `A` with `A a_j = 2π e_j`, row-major.
    pub fn a_matrix(&self) -> &[Vec<f64>] {
        &self.a
    }

    /// Dual vector `b_j = Aᵀ e_j`.
    pub fn dual(&self, j: usize) -> Vec<f64> {
        self.a[j].clone()
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume
    }

    /// `Aᵀ v`.
    pub fn a_transpose_apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|l| (0..n).map(|j| self.a[j][l] * v[j]).sum()).collect()
    }

    /// `‖Aᵀ(θ − k)‖²`, the eigenvalue of `-Δ_θ` on the mode `k`.
    pub fn laplace_eigenvalue(&self, theta: &[f64], k: &[i64]) -> f64 {
        let d: Vec<f64> = theta.iter().zip(k).map(|(t, &k)| t - k as f64).collect();
        self.a_transpose_apply(&d).iter().map(|x| x * x).sum()
    }

    pub fn to_cartesian(&self, s: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|l| (0..n).map(|j| s[j] * self.basis[j][l]).sum()).collect()
    }

    pub fn to_lattice(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|j| (0..n).map(|l| self.a[j][l] * x[l]).sum::<f64>() / (2.0 * PI)).collect()
    }

    /// Side lengths if the basis is diagonal with positive entries.
    pub fn rectangular_sides(&self) -> Option<Vec<f64>> {
        let n = self.dim();
        let scale = self.basis.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        for j in 0..n {
            for l in 0..n {
                if l != j && self.basis[j][l].abs() > 1e-14 * scale {
                    return None;
                }
            }
            if self.basis[j][j] <= 0.0 {
                return None;
            }
        }
        Some((0..n).map(|j| self.basis[j][j]).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadRule {
    Midpoint,
    Gauss,
}

/// One-dimensional rule on `[0, 1]`.
pub fn rule_1d(rule: QuadRule, points: usize) -> Vec<(f64, f64)> {
    match rule {
        QuadRule::Midpoint => (0..points).map(|i| ((i as f64 + 0.5) / points as f64, 1.0 / points as f64)).collect(),
        QuadRule::Gauss => {
            let gl = GaussLegendre::new(NonZeroUsize::new(points.max(1)).unwrap());
            let mut v: Vec<(f64, f64)> =
                gl.as_node_weight_pairs().iter().map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            v
        }
    }
}

fn tensor(rules: &[Vec<(f64, f64)>]) -> Vec<(Vec<f64>, f64)> {
    let mut out = vec![(Vec::new(), 1.0)];
    for r in rules {
        let mut next = Vec::with_capacity(out.len() * r.len());
        for (s, w) in &out {
            for &(x, wx) in r {
                let mut s2 = s.clone();
                s2.push(x);
                next.push((s2, w * wx));
            }
        }
        out = next;
    }
    out
}

/// Tensor quadrature grid over the cell.
#[derive(Debug, Clone)]
pub struct CellGrid {
    pub resolution: Vec<usize>,
    pub rule: QuadRule,
    pub lattice_nodes: Vec<Vec<f64>>,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl CellGrid {
    /// Midpoint grid with `resolution` points per axis.
    pub fn new(lat: &Lattice, resolution: usize) -> Self {
        CellGrid::with_rule(lat, &vec![resolution; lat.dim()], QuadRule::Midpoint)
    }

    pub fn gauss(lat: &Lattice, points: usize) -> Self {
        CellGrid::with_rule(lat, &vec![points; lat.dim()], QuadRule::Gauss)
    }

    pub fn with_rule(lat: &Lattice, resolution: &[usize], rule: QuadRule) -> Self {
        let rules: Vec<_> = resolution.iter().map(|&r| rule_1d(rule, r)).collect();
        let pts = tensor(&rules);
        let vol = lat.cell_volume();
        let nodes = pts.iter().map(|(s, _)| lat.to_cartesian(s)).collect();
        let weights = pts.iter().map(|(_, w)| w * vol).collect();
        let lattice_nodes = pts.into_iter().map(|(s, _)| s).collect();
        CellGrid { resolution: resolution.to_vec(), rule, lattice_nodes, nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Quadrature on the face `∂Q_j^s` of a rectangular cell.
#[derive(Debug, Clone)]
pub struct FaceGrid {
    pub axis: usize,
    pub side: usize,
    pub normal: Vec<f64>,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub x_dot_nu: Vec<f64>,
}

impl FaceGrid {
    pub fn new(lat: &Lattice, axis: usize, side: usize, resolution: usize) -> Result<Self> {
        FaceGrid::with_rule(lat, axis, side, resolution, QuadRule::Midpoint)
    }

    pub fn with_rule(lat: &Lattice, axis: usize, side: usize, resolution: usize, rule: QuadRule) -> Result<Self> {
        let sides = lat
            .rectangular_sides()
            .ok_or_else(|| Error::UnsupportedLattice("face quadrature needs a rectangular cell".into()))?;
        let n = lat.dim();
        if axis >= n || side > 1 {
            return Err(Error::DimensionMismatch(format!("face ({axis}, {side}) of an {n}-cell")));
        }
        let rules: Vec<_> =
            (0..n).map(|j| if j == axis { vec![(side as f64, 1.0)] } else { rule_1d(rule, resolution) }).collect();
        let mut normal = vec![0.0; n];
        normal[axis] = if side == 1 { 1.0 } else { -1.0 };
        let area: f64 = (0..n).filter(|&j| j != axis).map(|j| sides[j]).product();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut x_dot_nu = Vec::new();
        for (s, w) in tensor(&rules) {
            let x = lat.to_cartesian(&s);
            x_dot_nu.push(x.iter().zip(&normal).map(|(a, b)| a * b).sum());
            nodes.push(x);
            weights.push(w * area);
        }
        Ok(FaceGrid { axis, side, normal, nodes, weights, x_dot_nu })
    }

    /// All `2n` faces of the cell.
    pub fn all(lat: &Lattice, resolution: usize, rule: QuadRule) -> Result<Vec<FaceGrid>> {
        let mut out = Vec::new();
        for axis in 0..lat.dim() {
            for side in 0..2 {
                out.push(FaceGrid::with_rule(lat, axis, side, resolution, rule)?);
            }
        }
        Ok(out)
    }
}
