//! Thin helpers over `faer` dense linear algebra.

use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};

pub use faer::c64;

pub type RMat = Mat<f64>;
pub type CMat = Mat<c64>;

pub fn cx(re: f64, im: f64) -> c64 {
    c64::new(re, im)
}

/// Real representation of a complex matrix with interleaved (Re, Im) slots:
/// entry (i, j) becomes the block `[[Re, -Im], [Im, Re]]`.
pub fn realify(h: MatRef<'_, c64>) -> RMat {
    let (r, c) = (h.nrows(), h.ncols());
    Mat::from_fn(2 * r, 2 * c, |i, j| {
        let z = h[(i / 2, j / 2)];
        match (i % 2, j % 2) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    })
}

/// `a ⊗ I₂` with interleaved ordering.
pub fn kron_i2(a: MatRef<'_, f64>) -> RMat {
    Mat::from_fn(2 * a.nrows(), 2 * a.ncols(), |i, j| if i % 2 == j % 2 { a[(i / 2, j / 2)] } else { 0.0 })
}

pub fn to_complex(a: MatRef<'_, f64>) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| cx(a[(i, j)], 0.0))
}

pub fn max_abs_r(a: MatRef<'_, f64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].abs());
        }
    }
    m
}

pub fn max_abs_c(a: MatRef<'_, c64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn symmetrize_r(a: &mut RMat) {
    let n = a.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

pub fn hermitize(a: &mut CMat) {
    let n = a.nrows();
    for i in 0..n {
        a[(i, i)] = cx(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let v = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
    }
}

pub fn symmetric_eigen(a: MatRef<'_, f64>) -> Result<(Vec<f64>, RMat)> {
    let e = a.self_adjoint_eigen(Side::Lower).map_err(|_| Error::ConvergenceFailure)?;
    let vals = e.S().column_vector().iter().copied().collect();
    Ok((vals, e.U().to_owned()))
}

pub fn hermitian_eigen(a: MatRef<'_, c64>) -> Result<(Vec<f64>, CMat)> {
    let e = a.self_adjoint_eigen(Side::Lower).map_err(|_| Error::ConvergenceFailure)?;
    let vals = e.S().column_vector().iter().map(|z| z.re).collect();
    Ok((vals, e.U().to_owned()))
}

pub fn symmetric_eigenvalues(a: MatRef<'_, f64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::ConvergenceFailure)
}

pub fn hermitian_eigenvalues(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::ConvergenceFailure)
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues(a: MatRef<'_, c64>) -> Result<Vec<c64>> {
    a.eigenvalues().map_err(|_| Error::ConvergenceFailure)
}

/// Singular values in nonincreasing order.
pub fn singular_values(a: MatRef<'_, f64>) -> Result<Vec<f64>> {
    a.singular_values().map_err(|_| Error::ConvergenceFailure)
}

/// Orthonormal basis of `{v : a v ≈ 0}` from the singular values below `tol`.
pub fn null_space_r(a: MatRef<'_, f64>, tol: f64) -> Result<RMat> {
    let svd = a.svd().map_err(|_| Error::ConvergenceFailure)?;
    let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let n = a.ncols();
    let cols: Vec<usize> = (0..n).filter(|&j| j >= s.len() || s[j] < tol).collect();
    let v = svd.V();
    Ok(Mat::from_fn(n, cols.len(), |i, k| v[(i, cols[k])]))
}

pub fn null_space_c(a: MatRef<'_, c64>, tol: f64) -> Result<CMat> {
    let svd = a.svd().map_err(|_| Error::ConvergenceFailure)?;
    let s: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    let n = a.ncols();
    let cols: Vec<usize> = (0..n).filter(|&j| j >= s.len() || s[j] < tol).collect();
    let v = svd.V();
    Ok(Mat::from_fn(n, cols.len(), |i, k| v[(i, cols[k])]))
}

/// Orthonormal basis of the column space of a full-rank tall matrix.
pub fn orthonormalize(a: MatRef<'_, f64>) -> RMat {
    a.qr().compute_thin_Q()
}

pub fn inverse_r(a: MatRef<'_, f64>) -> RMat {
    a.partial_piv_lu().inverse()
}

pub fn inverse_c(a: MatRef<'_, c64>) -> CMat {
    a.partial_piv_lu().inverse()
}

pub fn identity_r(n: usize) -> RMat {
    Mat::identity(n, n)
}

/// Inverse square root of a Hermitian positive definite matrix.
pub fn inv_sqrt_hermitian(a: MatRef<'_, c64>) -> Result<CMat> {
    let (vals, vecs) = hermitian_eigen(a)?;
    let n = vals.len();
    let d = Mat::from_fn(n, n, |i, j| if i == j { cx(1.0 / vals[i].max(1e-300).sqrt(), 0.0) } else { cx(0.0, 0.0) });
    Ok(&vecs * &d * vecs.adjoint())
}

/// Rotates each column so that its first entry of significant size is real
/// and positive.
pub fn fix_phases_c(v: &mut CMat) {
    for j in 0..v.ncols() {
        let scale = (0..v.nrows()).map(|i| v[(i, j)].norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            continue;
        }
        let Some(i0) = (0..v.nrows()).find(|&i| v[(i, j)].norm() > 1e-8 * scale) else { continue };
        let z = v[(i0, j)];
        let phase = z.conj() / z.norm();
        for i in 0..v.nrows() {
            v[(i, j)] *= phase;
        }
    }
}

pub fn fix_signs_r(v: &mut RMat) {
    for j in 0..v.ncols() {
        let scale = (0..v.nrows()).map(|i| v[(i, j)].abs()).fold(0.0, f64::max);
        if let Some(i0) = (0..v.nrows()).find(|&i| v[(i, j)].abs() > 1e-8 * scale) {
            if v[(i0, j)] < 0.0 {
                for i in 0..v.nrows() {
                    v[(i, j)] = -v[(i, j)];
                }
            }
        }
    }
}
