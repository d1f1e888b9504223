//! Conjugate-point scan over `[τ, 1]`.

use std::cell::RefCell;

use roots::{find_root_brent, SimpleConvergency};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lattice::{FaceGrid, QuadRule};
use crate::linalg::{self, c64, cx, CMat};
use crate::potential::PotentialSpec;
use crate::shooting;
use crate::spectral::{
    assemble, assemble_derivative, eigen_flow, eigendecompose, eigenvalues, BasisSpec, EigenFlow, Field,
};

const MERGE: f64 = 1e-8;
const SUBDIVIDE_DEPTH: usize = 4;
const SLOPE_STEP: f64 = 1e-5;

#[derive(Debug, Clone)]
pub struct ScanSettings {
    pub tau: f64,
    pub t_points: usize,
    pub eps_ker: Option<f64>,
    pub eps_form: f64,
    pub t_tol: f64,
    /// In one dimension, refine `t*` and take kernels and forms from shooting.
    pub shooting: bool,
}

impl ScanSettings {
    pub fn new(tau: f64, t_points: usize) -> Self {
        ScanSettings { tau, t_points, eps_ker: None, eps_form: 1e-6, t_tol: 1e-10, shooting: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Start,
    End,
}

/// One conjugate point with its kernel and crossing-form data. Form values
/// and slopes are in the units of the scan field and sorted ascending.
#[derive(Debug, Clone, Serialize)]
pub struct Crossing {
    pub t_star: f64,
    /// Root of the Galerkin eigenvalue before any shooting refinement.
    pub t_galerkin: f64,
    pub endpoint: Option<Endpoint>,
    pub dim_c: usize,
    pub dim_r: usize,
    pub form_volume: Vec<f64>,
    pub form_boundary: Option<Vec<f64>>,
    pub slopes: Vec<f64>,
    pub n_plus: usize,
    pub n_minus: usize,
    pub signature: i64,
    pub regular: bool,
}

impl Crossing {
    /// Slopes and form eigenvalues agree in sign direction by direction.
    pub fn slopes_match_form(&self) -> bool {
        self.slopes.len() == self.form_volume.len()
            && self.slopes.iter().zip(&self.form_volume).all(|(s, f)| s.signum() == f.signum())
    }

    /// Largest relative gap between the volume and boundary form values.
    pub fn formula_gap(&self) -> Option<f64> {
        let b = self.form_boundary.as_ref()?;
        if b.len() != self.form_volume.len() {
            return Some(f64::INFINITY);
        }
        Some(
            self.form_volume
                .iter()
                .zip(b)
                .map(|(v, b)| (v - b).abs() / v.abs().max(b.abs()).max(1e-300))
                .fold(0.0, f64::max),
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossingReport {
    pub field: Field,
    pub bc: String,
    pub truncation: usize,
    pub tau: f64,
    /// Morse counts in scan-field units.
    pub morse_tau: usize,
    pub morse_one: usize,
    pub kernel_tau: usize,
    pub kernel_one: usize,
    /// `Mor(V(0))` of the complex matrix potential.
    pub origin_morse: usize,
    pub crossings: Vec<Crossing>,
    /// Maslov index along `t ↦ t` at `λ = 0`, realified.
    pub maslov: i64,
    pub flagged_steps: Vec<usize>,
    #[serde(skip)]
    pub flow: EigenFlow,
}

impl CrossingReport {
    /// Scan-field units per complex dimension.
    pub fn field_factor(&self) -> usize {
        match self.field {
            Field::Complex => 1,
            Field::Realified => 2,
        }
    }

    /// Complex Morse index at `t = 1`.
    pub fn morse_one_c(&self) -> usize {
        self.morse_one / self.field_factor()
    }

    pub fn morse_tau_c(&self) -> usize {
        self.morse_tau / self.field_factor()
    }

    pub fn has_irregular(&self) -> bool {
        self.crossings.iter().any(|c| !c.regular)
    }

    /// `Σ dim_C` over crossings, with the endpoints included as requested.
    pub fn dim_sum(&self, include_start: bool, include_end: bool) -> usize {
        self.crossings
            .iter()
            .filter(|c| match c.endpoint {
                Some(Endpoint::Start) => include_start,
                Some(Endpoint::End) => include_end,
                None => true,
            })
            .map(|c| c.dim_c)
            .sum()
    }
}

fn spectrum(
    basis: &BasisSpec,
    v: &PotentialSpec,
    t: f64,
    eps_ker: Option<f64>,
) -> Result<crate::spectral::SpectralResult> {
    let r = eigenvalues(&assemble(basis, v, t, 0.0)?)?;
    Ok(match eps_ker {
        Some(e) => r.with_eps_ker(e),
        None => r,
    })
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}

struct Scanner<'a> {
    basis: &'a BasisSpec,
    v: &'a PotentialSpec,
    settings: &'a ScanSettings,
    exec: &'a Execution,
}

impl Scanner<'_> {
    fn sorted_eigenvalue(&self, t: f64, r: usize) -> Result<f64> {
        Ok(spectrum(self.basis, self.v, t, None)?.values[r])
    }

    fn brent(&self, a: f64, b: f64, r: usize) -> Result<f64> {
        let err: RefCell<Option<Error>> = RefCell::new(None);
        let f = |t: f64| match self.sorted_eigenvalue(t, r) {
            Ok(x) => x,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        };
        let fa = f(a);
        if fa == 0.0 {
            return Ok(a);
        }
        let mut conv = SimpleConvergency { eps: self.settings.t_tol, max_iter: 200 };
        let root = find_root_brent(a, b, &f, &mut conv);
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        root.map_err(|e| Error::UnresolvedCrossing { t: 0.5 * (a + b), reason: format!("root search: {e}") })
    }

    /// Roots of sorted eigenvalues in every step of `flow`, recursing where a
    /// step carries both upward and downward sign changes.
    fn roots(&self, flow: &EigenFlow, depth: usize, out: &mut Vec<f64>) -> Result<()> {
        for i in 0..flow.t.len() - 1 {
            let (a, b) = (flow.t[i], flow.t[i + 1]);
            let down = flow.curves.iter().any(|c| c[i] >= 0.0 && c[i + 1] < 0.0);
            let up = flow.curves.iter().any(|c| c[i] < 0.0 && c[i + 1] >= 0.0);
            if !down && !up {
                continue;
            }
            if down && up && depth < SUBDIVIDE_DEPTH {
                let sub = eigen_flow(self.basis, self.v, &linspace(a, b, 9), self.exec)?;
                self.roots(&sub, depth + 1, out)?;
                continue;
            }
            let na = flow.curves.iter().filter(|c| c[i] < 0.0).count();
            let nb = flow.curves.iter().filter(|c| c[i + 1] < 0.0).count();
            for r in na.min(nb)..na.max(nb) {
                out.push(self.brent(a, b, r)?);
            }
        }
        Ok(())
    }
}

/// Hermitian boundary form over the faces of a rectangular cell:
/// `t Σ(x,ν)(u_a,V(tx)u_b) + t⁻¹Σ(x,ν)(∇u_a,∇u_b) - t⁻¹Σ[(x·∇u_a, ν·∇u_b) + (ν·∇u_a, x·∇u_b)]`.
pub fn boundary_form(basis: &BasisSpec, v: &PotentialSpec, t: f64, kernel: &[Vec<c64>]) -> Result<CMat> {
    let lat = basis.lattice();
    let n = lat.dim();
    let m = basis.m();
    let points = (4 * basis.truncation() + 16).max(48);
    let faces = FaceGrid::all(lat, points, QuadRule::Gauss)?;
    let coeffs: Vec<Vec<c64>> = kernel.iter().map(|k| basis.complex_coefficients(k)).collect();
    let d = kernel.len();
    let mut b = CMat::zeros(d, d);
    for face in &faces {
        for ((x, &w), &xn) in face.nodes.iter().zip(&face.weights).zip(&face.x_dot_nu) {
            let y: Vec<f64> = x.iter().map(|s| t * s).collect();
            let vt = v.eval(&y)?;
            let fields: Vec<(Vec<c64>, Vec<Vec<c64>>)> = coeffs.iter().map(|c| basis.reconstruct(c, x)).collect();
            let radial = |du: &Vec<Vec<c64>>, i: usize| -> c64 { (0..n).map(|l| du[l][i] * x[l]).sum() };
            let normal = |du: &Vec<Vec<c64>>, i: usize| -> c64 { (0..n).map(|l| du[l][i] * face.normal[l]).sum() };
            for p in 0..d {
                for q in 0..d {
                    let (up, dup) = &fields[p];
                    let (uq, duq) = &fields[q];
                    let mut pot = cx(0.0, 0.0);
                    let mut grad = cx(0.0, 0.0);
                    let mut mixed = cx(0.0, 0.0);
                    for i in 0..m {
                        for j in 0..m {
                            pot += up[i].conj() * uq[j] * vt[(i, j)];
                        }
                        for l in 0..n {
                            grad += dup[l][i].conj() * duq[l][i];
                        }
                        mixed += radial(dup, i).conj() * normal(duq, i) + normal(dup, i).conj() * radial(duq, i);
                    }
                    b[(p, q)] += (pot * (t * xn) + grad * (xn / t) - mixed / t) * w;
                }
            }
        }
    }
    if basis.field() == Field::Realified {
        b = CMat::from_fn(d, d, |i, j| cx(b[(i, j)].re, 0.0));
    }
    linalg::hermitize(&mut b);
    Ok(b)
}

fn duplicate(values: &[f64], factor: usize) -> Vec<f64> {
    let mut out: Vec<f64> = values.iter().flat_map(|&x| std::iter::repeat_n(x, factor)).collect();
    out.sort_by(f64::total_cmp);
    out
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

impl Scanner<'_> {
    fn analyse(&self, t_galerkin: f64, multiplicity: usize, endpoint: Option<Endpoint>) -> Result<Crossing> {
        let (basis, v, s) = (self.basis, self.v, self.settings);
        let one_d = basis.lattice().dim() == 1 && s.shooting;
        let factor = if basis.field() == Field::Realified { 2 } else { 1 };

        let mut t_star = t_galerkin;
        if one_d && endpoint.is_none() {
            let w = 1e-3;
            let lo = (t_galerkin - w).max(s.tau);
            let hi = (t_galerkin + w).min(1.0);
            let found = shooting::refine_crossing(v, basis.bc(), lo, hi)?;
            if let Some(&best) = found.iter().min_by(|a, b| (*a - t_galerkin).abs().total_cmp(&(*b - t_galerkin).abs()))
            {
                t_star = best;
            }
        }

        let op = assemble(basis, v, t_star, 0.0)?;
        let mut res = eigendecompose(&op)?;
        if let Some(e) = s.eps_ker {
            res = res.with_eps_ker(e);
        }
        let mut idx = res.kernel_indices();
        if idx.len() < multiplicity * factor {
            let mut order: Vec<usize> = (0..res.values.len()).collect();
            order.sort_by(|&a, &b| res.values[a].abs().total_cmp(&res.values[b].abs()));
            idx = order[..multiplicity * factor].to_vec();
            idx.sort();
        }
        let vecs = res.vectors.as_ref().expect("eigenvectors");
        let kernel: Vec<Vec<c64>> = idx.iter().map(|&j| vecs.column(j)).collect();

        let (dim_c, dim_r, form_volume, form_boundary) = if one_d {
            let steps = 2 * shooting::default_steps(v, 0.0)?;
            let k = shooting::kernel_1d(v, basis.bc(), t_star, steps, 1e-7)?;
            let dim_r = shooting::real_kernel_dim(v, basis.bc(), t_star, steps)?;
            let vol = linalg::hermitian_eigenvalues(k.volume_form.as_ref())?;
            let bdy = linalg::hermitian_eigenvalues(k.boundary_form.as_ref())?;
            (k.dim_complex, dim_r, duplicate(&vol, factor), Some(duplicate(&bdy, factor)))
        } else {
            let complex = basis.with_field(Field::Complex);
            let realified = basis.with_field(Field::Realified);
            let count = |b: &BasisSpec| -> Result<usize> { Ok(spectrum(b, v, t_star, s.eps_ker)?.kernel_dim()) };
            let (dim_c, dim_r) = match basis.field() {
                Field::Complex => (idx.len(), count(&realified)?),
                Field::Realified => (count(&complex)?, idx.len()),
            };
            let d = assemble_derivative(basis, v, t_star)?;
            let mut q = d.compress(&kernel);
            linalg::hermitize(&mut q);
            let vol = linalg::hermitian_eigenvalues(q.as_ref())?;
            let bdy = if basis.lattice().rectangular_sides().is_some() {
                let b = boundary_form(basis, v, t_star, &kernel)?;
                Some(linalg::hermitian_eigenvalues(b.as_ref())?)
            } else {
                None
            };
            (dim_c, dim_r, vol, bdy)
        };

        let slopes = {
            let h = SLOPE_STEP;
            let (lo, hi) = match endpoint {
                Some(Endpoint::Start) => (t_star, t_star + h),
                Some(Endpoint::End) => (t_star - h, t_star),
                None => (t_star - h, t_star + h),
            };
            let a = spectrum(basis, v, lo, None)?;
            let b = spectrum(basis, v, hi, None)?;
            sorted(idx.iter().map(|&j| (b.values[j] - a.values[j]) / (hi - lo)).collect())
        };

        let scale = form_volume.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let min_abs = form_volume.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
        let regular = !form_volume.is_empty() && min_abs > s.eps_form * scale;
        let n_plus = form_volume.iter().filter(|&&x| x > 0.0).count();
        let n_minus = form_volume.iter().filter(|&&x| x < 0.0).count();
        Ok(Crossing {
            t_star,
            t_galerkin,
            endpoint,
            dim_c,
            dim_r,
            form_volume,
            form_boundary,
            slopes,
            n_plus,
            n_minus,
            signature: n_plus as i64 - n_minus as i64,
            regular,
        })
    }
}

/// Scans `t ∈ [τ, 1]` for kernels of the Galerkin operator and evaluates the
/// crossing form at each.
pub fn scan_conjugate_points(
    basis: &BasisSpec,
    v: &PotentialSpec,
    settings: &ScanSettings,
    exec: &Execution,
) -> Result<CrossingReport> {
    let tau = settings.tau;
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::config("solver.tau", "must lie in (0, 1)"));
    }
    let grid = linspace(tau, 1.0, settings.t_points.max(2));
    let flow = eigen_flow(basis, v, &grid, exec)?;
    let sc = Scanner { basis, v, settings, exec };

    let mut roots = Vec::new();
    sc.roots(&flow, 0, &mut roots)?;
    roots.sort_by(f64::total_cmp);
    let merge = MERGE.max(10.0 * settings.t_tol);
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for r in roots {
        match groups.last_mut() {
            Some((t, k)) if r - *t <= merge => *k += 1,
            _ => groups.push((r, 1)),
        }
    }

    let start = spectrum(basis, v, tau, settings.eps_ker)?;
    let end = spectrum(basis, v, 1.0, settings.eps_ker)?;
    let factor = if basis.field() == Field::Realified { 2 } else { 1 };
    let mut targets: Vec<(f64, usize, Option<Endpoint>)> = Vec::new();
    let at_start = start.kernel_dim() > 0 || groups.first().is_some_and(|g| g.0 - tau <= merge);
    let at_end = end.kernel_dim() > 0 || groups.last().is_some_and(|g| 1.0 - g.0 <= merge);
    if at_start {
        targets.push((tau, (start.kernel_dim() / factor).max(1), Some(Endpoint::Start)));
    }
    for &(t, k) in &groups {
        if (at_start && t - tau <= merge) || (at_end && 1.0 - t <= merge) {
            continue;
        }
        targets.push((t, k / factor, None));
    }
    if at_end {
        targets.push((1.0, (end.kernel_dim() / factor).max(1), Some(Endpoint::End)));
    }

    let mut crossings = Vec::with_capacity(targets.len());
    for (t, k, e) in targets {
        crossings.push(sc.analyse(t, k.max(1), e)?);
    }

    let mut maslov = 0i64;
    for c in &crossings {
        let (np, nm) = (c.n_plus as i64, c.n_minus as i64);
        maslov += match c.endpoint {
            Some(Endpoint::Start) => -nm,
            Some(Endpoint::End) => np,
            None => np - nm,
        };
    }
    maslov *= (2 / factor) as i64;

    Ok(CrossingReport {
        field: basis.field(),
        bc: basis.bc().label(),
        truncation: basis.truncation(),
        tau,
        morse_tau: start.morse_index()?,
        morse_one: end.morse_index()?,
        kernel_tau: start.kernel_dim(),
        kernel_one: end.kernel_dim(),
        origin_morse: v.origin_morse()?,
        crossings,
        maslov,
        flagged_steps: flow.flagged.clone(),
        flow,
    })
}
