use faer::Mat;

use super::basis::{BasisSpec, BoundaryCondition, Field};
use crate::error::{Error, Result};
use crate::linalg::{self, c64, cx, CMat, RMat};
use crate::potential::{PotentialSpec, TransformTable};

/// Assembled matrix in the basis field.
#[derive(Debug, Clone)]
pub enum Matrix {
    Complex(CMat),
    Real(RMat),
}

impl Matrix {
    pub fn dim(&self) -> usize {
        match self {
            Matrix::Complex(h) => h.nrows(),
            Matrix::Real(h) => h.nrows(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Matrix::Complex(h) => linalg::max_abs_c(h.as_ref()),
            Matrix::Real(h) => linalg::max_abs_r(h.as_ref()),
        }
    }

    /// Entry as a complex number.
    pub fn get(&self, i: usize, j: usize) -> c64 {
        match self {
            Matrix::Complex(h) => h[(i, j)],
            Matrix::Real(h) => cx(h[(i, j)], 0.0),
        }
    }

    /// `‖H - H*‖_max`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut d = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                d = d.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        d
    }

    /// `Xᴴ H X` for a set of columns given in the same field.
    pub fn compress(&self, cols: &[Vec<c64>]) -> CMat {
        let k = cols.len();
        let n = self.dim();
        let hx: Vec<Vec<c64>> =
            cols.iter().map(|c| (0..n).map(|i| (0..n).map(|j| self.get(i, j) * c[j]).sum()).collect()).collect();
        Mat::from_fn(k, k, |a, b| (0..n).map(|i| cols[a][i].conj() * hx[b][i]).sum())
    }
}

/// Truncated matrix of `α(-Δ_bc) + t²V(tx) - λ_shift`.
#[derive(Debug, Clone)]
pub struct GalerkinOperator {
    pub matrix: Matrix,
    pub t: f64,
    pub shift: f64,
    pub laplace_scale: f64,
    pub basis: BasisSpec,
    pub resolution: Option<usize>,
}

impl GalerkinOperator {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Per-axis expansion of a product of two mode functions into exponentials
/// `e^{iπν s}`, as `(coefficient, ν)` pairs.
fn axis_terms(bc: &BoundaryCondition, k: i64, kp: i64) -> Vec<(f64, i64)> {
    match bc {
        BoundaryCondition::Theta(_) => vec![(1.0, 2 * (k - kp))],
        BoundaryCondition::Dirichlet => {
            vec![(0.5, k - kp), (0.5, kp - k), (-0.5, k + kp), (-0.5, -(k + kp))]
        }
        BoundaryCondition::Neumann => {
            let norm = |k: i64| if k == 0 { 1.0 } else { std::f64::consts::SQRT_2 };
            let c = norm(k) * norm(kp) / 4.0;
            vec![(c, k - kp), (c, kp - k), (c, k + kp), (c, -(k + kp))]
        }
    }
}

fn nu_bound(basis: &BasisSpec) -> i64 {
    let k = basis.truncation() as i64;
    match basis.bc() {
        BoundaryCondition::Theta(_) => 4 * k,
        _ => 2 * k,
    }
}

fn check_resolution(basis: &BasisSpec, v: &PotentialSpec) -> Result<Option<usize>> {
    if v.m() != basis.m() {
        return Err(Error::DimensionMismatch(format!("potential block {} vs basis block {}", v.m(), basis.m())));
    }
    if v.lattice() != basis.lattice() {
        return Err(Error::DimensionMismatch("potential and basis live on different lattices".into()));
    }
    match v.sample_resolution() {
        Some(r) => {
            let required = 2 * (2 * basis.truncation() + 1);
            if r < required {
                return Err(Error::AliasingRisk { resolution: r, required });
            }
            Ok(Some(r))
        }
        None => Ok(None),
    }
}

fn potential_block(basis: &BasisSpec, table: &TransformTable) -> CMat {
    let modes = basis.modes();
    let m = basis.m();
    let n = basis.lattice().dim();
    let bc = basis.bc();
    let dim = modes.len() * m;
    let mut h = Mat::<c64>::zeros(dim, dim);
    let mut nu = vec![0i64; n];
    for (i, ki) in modes.iter().enumerate() {
        for (ip, kp) in modes.iter().enumerate().skip(i) {
            let per_axis: Vec<Vec<(f64, i64)>> = (0..n).map(|j| axis_terms(bc, ki[j], kp[j])).collect();
            let mut block = vec![cx(0.0, 0.0); m * m];
            let mut idx = vec![0usize; n];
            'combos: loop {
                let mut coef = 1.0;
                for j in 0..n {
                    let (c, v) = per_axis[j][idx[j]];
                    coef *= c;
                    nu[j] = v;
                }
                let g = table.get(&nu);
                for (b, z) in block.iter_mut().zip(g) {
                    *b += z * coef;
                }
                for j in (0..n).rev() {
                    idx[j] += 1;
                    if idx[j] < per_axis[j].len() {
                        continue 'combos;
                    }
                    idx[j] = 0;
                }
                break;
            }
            for a in 0..m {
                for b in 0..m {
                    let z = block[a * m + b];
                    h[(i * m + a, ip * m + b)] = z;
                    if ip != i {
                        h[(ip * m + b, i * m + a)] = z.conj();
                    }
                }
            }
        }
    }
    linalg::hermitize(&mut h);
    h
}

fn finish(basis: &BasisSpec, mut h: CMat) -> Matrix {
    linalg::hermitize(&mut h);
    match basis.field() {
        Field::Complex => Matrix::Complex(h),
        Field::Realified => {
            let mut r = linalg::realify(h.as_ref());
            linalg::symmetrize_r(&mut r);
            Matrix::Real(r)
        }
    }
}

/// Assembles `-Δ_bc + t²V(tx) - λ_shift` in the given basis.
pub fn assemble(basis: &BasisSpec, v: &PotentialSpec, t: f64, shift: f64) -> Result<GalerkinOperator> {
    assemble_scaled(basis, v, 1.0, t, shift)
}

/// Assembles `α(-Δ_bc) + t²V(tx) - λ_shift`.
pub fn assemble_scaled(
    basis: &BasisSpec,
    v: &PotentialSpec,
    laplace_scale: f64,
    t: f64,
    shift: f64,
) -> Result<GalerkinOperator> {
    let resolution = check_resolution(basis, v)?;
    let nb = nu_bound(basis);
    let table = v.transform_table(t, &vec![nb; basis.lattice().dim()], false)?;
    let mut h = potential_block(basis, &table);
    let m = basis.m();
    for (i, mode) in basis.modes().iter().enumerate() {
        let d = laplace_scale * basis.laplace_eigenvalue(mode) - shift;
        for a in 0..m {
            h[(i * m + a, i * m + a)] += cx(d, 0.0);
        }
    }
    Ok(GalerkinOperator { matrix: finish(basis, h), t, shift, laplace_scale, basis: basis.clone(), resolution })
}

/// Galerkin matrix of `D_t = ∂_t(t²V(tx))`.
pub fn assemble_derivative(basis: &BasisSpec, v: &PotentialSpec, t: f64) -> Result<Matrix> {
    check_resolution(basis, v)?;
    if !v.has_gradient() {
        return Err(Error::NoGradient);
    }
    let nb = nu_bound(basis);
    let table = v.transform_table(t, &vec![nb; basis.lattice().dim()], true)?;
    Ok(finish(basis, potential_block(basis, &table)))
}
