use faer::Mat;

use super::assemble::{GalerkinOperator, Matrix};
use crate::error::{Error, Result};
use crate::linalg::{self, c64, cx, CMat, RMat};

/// Eigenvectors in the field of the operator.
#[derive(Debug, Clone)]
pub enum Vectors {
    Complex(CMat),
    Real(RMat),
}

impl Vectors {
    pub fn ncols(&self) -> usize {
        match self {
            Vectors::Complex(v) => v.ncols(),
            Vectors::Real(v) => v.ncols(),
        }
    }

    pub fn nrows(&self) -> usize {
        match self {
            Vectors::Complex(v) => v.nrows(),
            Vectors::Real(v) => v.nrows(),
        }
    }

    /// Column `j` as complex entries.
    pub fn column(&self, j: usize) -> Vec<c64> {
        match self {
            Vectors::Complex(v) => (0..v.nrows()).map(|i| v[(i, j)]).collect(),
            Vectors::Real(v) => (0..v.nrows()).map(|i| cx(v[(i, j)], 0.0)).collect(),
        }
    }

    /// Leading `k` columns.
    pub fn truncate(&self, k: usize) -> Vectors {
        match self {
            Vectors::Complex(v) => Vectors::Complex(v.get(.., ..k).to_owned()),
            Vectors::Real(v) => Vectors::Real(v.get(.., ..k).to_owned()),
        }
    }

    /// `|⟨self_j, other_l⟩|²` for all pairs.
    pub fn overlaps(&self, other: &Vectors) -> RMat {
        match (self, other) {
            (Vectors::Complex(a), Vectors::Complex(b)) => {
                let o = a.adjoint() * b;
                Mat::from_fn(o.nrows(), o.ncols(), |i, j| o[(i, j)].norm_sqr())
            }
            (Vectors::Real(a), Vectors::Real(b)) => {
                let o = a.transpose() * b;
                Mat::from_fn(o.nrows(), o.ncols(), |i, j| o[(i, j)] * o[(i, j)])
            }
            _ => panic!("overlap between different fields"),
        }
    }
}

/// Eigen-decomposition with Morse and kernel counts.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub values: Vec<f64>,
    pub vectors: Option<Vectors>,
    pub eps_ker: f64,
}

/// Default kernel tolerance for a spectral radius estimate `rho`.
pub fn kernel_tolerance(rho: f64) -> f64 {
    1e-8 * rho.max(1.0)
}

fn spectral_radius(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Full eigendecomposition, ascending, with deterministic phases.
pub fn eigendecompose(op: &GalerkinOperator) -> Result<SpectralResult> {
    let (values, vectors) = match &op.matrix {
        Matrix::Complex(h) => {
            let (vals, mut vecs) = linalg::hermitian_eigen(h.as_ref())?;
            linalg::fix_phases_c(&mut vecs);
            (vals, Vectors::Complex(vecs))
        }
        Matrix::Real(h) => {
            let (vals, mut vecs) = linalg::symmetric_eigen(h.as_ref())?;
            linalg::fix_signs_r(&mut vecs);
            (vals, Vectors::Real(vecs))
        }
    };
    let eps_ker = kernel_tolerance(spectral_radius(&values));
    Ok(SpectralResult { values, vectors: Some(vectors), eps_ker })
}

/// Eigenvalues only.
pub fn eigenvalues(op: &GalerkinOperator) -> Result<SpectralResult> {
    let values = match &op.matrix {
        Matrix::Complex(h) => linalg::hermitian_eigenvalues(h.as_ref())?,
        Matrix::Real(h) => linalg::symmetric_eigenvalues(h.as_ref())?,
    };
    let eps_ker = kernel_tolerance(spectral_radius(&values));
    Ok(SpectralResult { values, vectors: None, eps_ker })
}

impl SpectralResult {
    pub fn with_eps_ker(mut self, eps_ker: f64) -> Self {
        self.eps_ker = eps_ker;
        self
    }

    /// Number of eigenvalues below `-ε_ker`.
    pub fn morse_index(&self) -> Result<usize> {
        let eps = self.eps_ker;
        if let Some(&v) = self.values.iter().find(|&&v| (v + eps).abs() < eps / 10.0) {
            return Err(Error::BoundaryAmbiguity { value: v, eps });
        }
        Ok(self.values.iter().filter(|&&v| v < -eps).count())
    }

    /// Number of eigenvalues with `|λ| ≤ ε_ker`.
    pub fn kernel_dim(&self) -> usize {
        self.values.iter().filter(|v| v.abs() <= self.eps_ker).count()
    }

    /// Indices of the kernel eigenvalues.
    pub fn kernel_indices(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.values[i].abs() <= self.eps_ker).collect()
    }

    /// Largest `‖Hv - λv‖` over all pairs.
    pub fn max_residual(&self, op: &GalerkinOperator) -> f64 {
        let Some(vecs) = &self.vectors else { return f64::NAN };
        let n = op.dim();
        let mut worst = 0.0f64;
        for (j, &lam) in self.values.iter().enumerate() {
            let v = vecs.column(j);
            let mut r = 0.0;
            for i in 0..n {
                let hv: c64 = (0..n).map(|k| op.matrix.get(i, k) * v[k]).sum();
                r += (hv - v[i] * lam).norm_sqr();
            }
            worst = worst.max(r.sqrt());
        }
        worst
    }
}
