//! Finite-dimensional symplectic linear algebra: Lagrangian frames, the
//! Souriau map, and the Maslov index of a path of Lagrangian planes relative
//! to a fixed plane, both as the spectral flow of the Souriau unitary through
//! `-1` and as a sum of crossing-form signatures.
//!
//! Paths are closures `t ↦ frame` returning any `2N×N` matrix whose columns
//! span the plane; frames are orthonormalized internally.

use std::f64::consts::PI;

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, cx, CMat, RMat};

/// A path of Lagrangian planes given by spanning matrices.
pub type FramePath<'a> = dyn Fn(f64) -> Result<RMat> + Sync + 'a;

const LAGRANGIAN_TOL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-8;
const MIN_STEP: f64 = 1e-12;
const ENDPOINT_PHASE: f64 = 1e-8;

/// `R^{2N}` with a compatible complex structure `J`.
#[derive(Debug, Clone)]
pub struct SymplecticSpace {
    j: RMat,
}

impl SymplecticSpace {
    /// `J = [[0, -I], [I, 0]]` on `R^N ⊕ R^N`.
    pub fn standard(n: usize) -> Self {
        let j = Mat::from_fn(2 * n, 2 * n, |r, c| {
            if r >= n && c == r - n {
                1.0
            } else if r < n && c == r + n {
                -1.0
            } else {
                0.0
            }
        });
        SymplecticSpace { j }
    }

    /// Requires `J² = -I` and `Jᵀ = -J`.
    pub fn from_j(j: RMat) -> Result<Self> {
        let d = j.nrows();
        if d == 0 || d % 2 != 0 || j.ncols() != d {
            return Err(Error::DimensionMismatch(format!("J must be square of even size, got {}x{}", d, j.ncols())));
        }
        let sq = &j * &j + linalg::identity_r(d);
        let skew = &j + j.transpose();
        let res = linalg::max_abs_r(sq.as_ref()).max(linalg::max_abs_r(skew.as_ref()));
        if res > 1e-12 {
            return Err(Error::DimensionMismatch(format!(
                "J is not a compatible complex structure (residual {res:e})"
            )));
        }
        Ok(SymplecticSpace { j })
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn half_dim(&self) -> usize {
        self.j.nrows() / 2
    }

    pub fn j(&self) -> &RMat {
        &self.j
    }

    /// `ω(u, v) = (Ju, v)`.
    pub fn omega(&self, u: &[f64], v: &[f64]) -> f64 {
        let d = self.dim();
        (0..d).map(|r| (0..d).map(|c| self.j[(r, c)] * u[c]).sum::<f64>() * v[r]).sum()
    }

    /// `Xᵀ J X`, zero exactly when the columns span an isotropic subspace.
    pub fn omega_matrix(&self, x: &RMat) -> RMat {
        x.transpose() * &self.j * x
    }
}

/// Orthonormal frame of a Lagrangian subspace.
#[derive(Debug, Clone)]
pub struct LagrangianFrame {
    x: RMat,
}

impl LagrangianFrame {
    /// Orthonormalizes the columns and checks the Lagrangian property.
    pub fn new(space: &SymplecticSpace, span: &RMat) -> Result<Self> {
        if span.nrows() != space.dim() || span.ncols() != space.half_dim() {
            return Err(Error::DimensionMismatch(format!(
                "frame is {}x{}, space needs {}x{}",
                span.nrows(),
                span.ncols(),
                space.dim(),
                space.half_dim()
            )));
        }
        let sv = linalg::singular_values(span.as_ref())?;
        if sv.last().copied().unwrap_or(0.0) <= 1e-12 * sv[0] {
            return Err(Error::NotLagrangian { residual: f64::INFINITY });
        }
        let x = linalg::orthonormalize(span.as_ref());
        let residual = linalg::max_abs_r(space.omega_matrix(&x).as_ref());
        if residual > LAGRANGIAN_TOL {
            return Err(Error::NotLagrangian { residual });
        }
        Ok(LagrangianFrame { x })
    }

    pub fn matrix(&self) -> &RMat {
        &self.x
    }

    pub fn half_dim(&self) -> usize {
        self.x.ncols()
    }

    /// Orthogonal projection `XXᵀ`.
    pub fn projector(&self) -> RMat {
        &self.x * self.x.transpose()
    }
}

/// Identification `R^{2N} ≅ C^N`, `u ↦ Xᵀu + i(JX)ᵀu`, under which `J` is
/// multiplication by `i` and `(u, v) - iω(u, v)` is the Hermitian product.
#[derive(Debug, Clone)]
pub struct Complexification {
    x: RMat,
    jx: RMat,
}

pub fn complexify(space: &SymplecticSpace, x: &LagrangianFrame) -> Result<Complexification> {
    let residual = linalg::max_abs_r(space.omega_matrix(&x.x).as_ref());
    if residual > LAGRANGIAN_TOL {
        return Err(Error::NotLagrangian { residual });
    }
    Ok(Complexification { x: x.x.clone(), jx: space.j() * &x.x })
}

impl Complexification {
    pub fn to_complex(&self, u: &[f64]) -> Vec<c64> {
        let n = self.x.ncols();
        (0..n)
            .map(|k| {
                let re: f64 = u.iter().enumerate().map(|(i, v)| self.x[(i, k)] * v).sum();
                let im: f64 = u.iter().enumerate().map(|(i, v)| self.jx[(i, k)] * v).sum();
                cx(re, im)
            })
            .collect()
    }

    pub fn from_complex(&self, z: &[c64]) -> Vec<f64> {
        let d = self.x.nrows();
        (0..d)
            .map(|i| z.iter().enumerate().map(|(k, w)| self.x[(i, k)] * w.re + self.jx[(i, k)] * w.im).sum())
            .collect()
    }

    /// `Σ z_u conj(z_v)`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> c64 {
        let zu = self.to_complex(u);
        let zv = self.to_complex(v);
        zu.iter().zip(&zv).map(|(a, b)| a * b.conj()).sum()
    }

    /// Complex matrix of a `J`-linear real operator.
    pub fn matrix_of(&self, s: &RMat) -> CMat {
        let sx = s * &self.x;
        let re = self.x.transpose() * &sx;
        let im = self.jx.transpose() * &sx;
        Mat::from_fn(re.nrows(), re.ncols(), |i, j| cx(re[(i, j)], im[(i, j)]))
    }
}

/// Real form of the Souriau map `(I - 2P_Y)(2P_X - I)`.
pub fn souriau_real(x: &LagrangianFrame, y: &LagrangianFrame) -> RMat {
    let d = x.x.nrows();
    let id = linalg::identity_r(d);
    let a = &id - y.projector() * 2.0;
    let b = x.projector() * 2.0 - &id;
    a * b
}

/// The Souriau unitary as an `N×N` complex matrix in the `X`-adapted basis.
pub fn souriau(space: &SymplecticSpace, x: &LagrangianFrame, y: &LagrangianFrame) -> Result<CMat> {
    if x.x.nrows() != y.x.nrows() || x.x.nrows() != space.dim() {
        return Err(Error::DimensionMismatch("frames live in different spaces".into()));
    }
    let c = complexify(space, x)?;
    Ok(c.matrix_of(&souriau_real(x, y)))
}

/// `dim_R(X ∩ Y)` from the real null space of `[X | -Y]`.
pub fn intersection_dim(x: &LagrangianFrame, y: &LagrangianFrame) -> Result<usize> {
    Ok(intersection_basis(x, y)?.ncols())
}

/// Orthonormal basis of `X ∩ Y`, as coordinates in the `Y` frame.
fn intersection_coords(x: &RMat, y: &RMat, tol: f64) -> Result<RMat> {
    let (d, n) = (x.nrows(), x.ncols());
    let stacked = Mat::from_fn(d, 2 * n, |i, j| if j < n { x[(i, j)] } else { -y[(i, j - n)] });
    let null = linalg::null_space_r(stacked.as_ref(), tol)?;
    Ok(Mat::from_fn(n, null.ncols(), |i, k| std::f64::consts::SQRT_2 * null[(n + i, k)]))
}

/// Orthonormal basis of `X ∩ Y` as vectors in `R^{2N}`.
pub fn intersection_basis(x: &LagrangianFrame, y: &LagrangianFrame) -> Result<RMat> {
    let b = intersection_coords(&x.x, &y.x, RANK_TOL)?;
    Ok(&y.x * b)
}

/// `dim_C ker(U + I)` from the singular values of `U + I`.
pub fn minus_one_multiplicity(u: &CMat, tol: f64) -> Result<usize> {
    let n = u.nrows();
    let shifted = Mat::from_fn(n, n, |i, j| if i == j { u[(i, j)] + 1.0 } else { u[(i, j)] });
    let sv = shifted.singular_values().map_err(|_| Error::ConvergenceFailure)?;
    Ok(sv.iter().filter(|&&s| s < tol).count())
}

/// `max |U*U - I|`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    let n = u.nrows();
    let p = u.adjoint() * u;
    let d = Mat::from_fn(n, n, |i, j| if i == j { p[(i, j)] - 1.0 } else { p[(i, j)] });
    linalg::max_abs_c(d.as_ref())
}

/// Eigenphases measured from `-1`: `arg(-λ) ∈ (-π, π]`, ascending.
pub fn signed_angles(u: &CMat) -> Result<Vec<f64>> {
    let mut s: Vec<f64> = linalg::eigenvalues(u.as_ref())?.iter().map(|l| (-l).arg()).collect();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// `k(t, ε)`: number of eigenphases `e^{i(π+θ)}` with `0 ≤ θ ≤ ε`.
fn count_arc(angles: &[f64], eps: f64) -> i64 {
    angles.iter().filter(|&&s| s >= -1e-9 && s <= eps).count() as i64
}

/// Gap position in `(0, π)` farthest from every given phase, and its margin.
fn choose_gap(angles: &[f64]) -> (f64, f64) {
    let samples = 2048;
    let mut best = (PI / 2.0, -1.0);
    for i in 1..samples {
        let e = PI * i as f64 / samples as f64;
        let margin = angles.iter().fold(f64::INFINITY, |m, &s| m.min(circ_dist(s, e))).min(e);
        if margin > best.1 {
            best = (e, margin);
        }
    }
    best
}

fn frob(a: &CMat, b: &CMat) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += (a[(i, j)] - b[(i, j)]).norm_sqr();
        }
    }
    s.sqrt()
}

/// Sampled unitary path with its eigenphases.
#[derive(Debug, Clone)]
pub struct UnitaryPath {
    pub t: Vec<f64>,
    pub unitaries: Vec<CMat>,
    pub angles: Vec<Vec<f64>>,
}

impl UnitaryPath {
    pub fn new(t: Vec<f64>, unitaries: Vec<CMat>) -> Result<Self> {
        if t.len() != unitaries.len() || t.len() < 2 {
            return Err(Error::DimensionMismatch("need at least two samples with matching times".into()));
        }
        for (ti, u) in t.iter().zip(&unitaries) {
            let d = unitarity_defect(u);
            if d > 1e-9 {
                return Err(Error::DimensionMismatch(format!("matrix at t = {ti} is not unitary ({d:e})")));
            }
        }
        let angles = unitaries.iter().map(signed_angles).collect::<Result<_>>()?;
        Ok(UnitaryPath { t, unitaries, angles })
    }

    /// Spectral flow through `-1` on the stored partition. Each step needs a
    /// gap phase whose distance to the eigenphases exceeds the largest
    /// possible eigenphase motion across the step.
    pub fn spectral_flow(&self) -> Result<i64> {
        let mut total = 0;
        for i in 1..self.t.len() {
            total += step_flow(&self.unitaries[i - 1], &self.angles[i - 1], &self.unitaries[i], &self.angles[i])
                .ok_or(Error::NoGapFound { t: self.t[i - 1] })?;
        }
        Ok(total)
    }
}

fn step_flow(ua: &CMat, sa: &[f64], ub: &CMat, sb: &[f64]) -> Option<i64> {
    let all: Vec<f64> = sa.iter().chain(sb).copied().collect();
    let (eps, margin) = choose_gap(&all);
    if margin <= 0.5 * PI * frob(ua, ub) {
        return None;
    }
    Some(count_arc(sb, eps) - count_arc(sa, eps))
}

/// Spectral flow of a unitary family through `-1` on `[t0, t1]`, starting
/// from `steps` uniform steps and bisecting any step without a safe gap.
pub fn spectral_flow(u: &(dyn Fn(f64) -> Result<CMat> + Sync), t0: f64, t1: f64, steps: usize) -> Result<i64> {
    let steps = steps.max(1);
    let ts: Vec<f64> = (0..=steps).map(|i| t0 + (t1 - t0) * i as f64 / steps as f64).collect();
    let mut total = 0;
    let mut prev = (u(ts[0])?, signed_angles(&u(ts[0])?)?);
    for &t in &ts[1..] {
        let m = u(t)?;
        let s = signed_angles(&m)?;
        let next = (m, s);
        total += refine_flow(
            u,
            prev.0.clone(),
            prev.1.clone(),
            next.0.clone(),
            next.1.clone(),
            t - (t1 - t0) / steps as f64,
            t,
        )?;
        prev = next;
    }
    Ok(total)
}

fn refine_flow(
    u: &(dyn Fn(f64) -> Result<CMat> + Sync),
    ua: CMat,
    sa: Vec<f64>,
    ub: CMat,
    sb: Vec<f64>,
    a: f64,
    b: f64,
) -> Result<i64> {
    if let Some(v) = step_flow(&ua, &sa, &ub, &sb) {
        return Ok(v);
    }
    if b - a < MIN_STEP {
        return Err(Error::NoGapFound { t: a });
    }
    let mid = 0.5 * (a + b);
    let um = u(mid)?;
    let sm = signed_angles(&um)?;
    Ok(refine_flow(u, ua, sa, um.clone(), sm.clone(), a, mid)? + refine_flow(u, um, sm, ub, sb, mid, b)?)
}

/// Souriau unitary of a frame path against `X`.
pub fn souriau_path<'a>(
    space: &'a SymplecticSpace,
    x: &'a LagrangianFrame,
    path: &'a FramePath<'a>,
) -> impl Fn(f64) -> Result<CMat> + Sync + 'a {
    move |t| {
        let y = LagrangianFrame::new(space, &path(t)?)?;
        souriau(space, x, &y)
    }
}

/// `Mas(Υ, X)` as the spectral flow of `S_X(Υ(t))` through `-1`.
pub fn maslov_spectral_flow(
    space: &SymplecticSpace,
    x: &LagrangianFrame,
    path: &FramePath<'_>,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<i64> {
    let u = souriau_path(space, x, path);
    spectral_flow(&u, t0, t1, steps)
}

/// Crossing form data at one crossing.
#[derive(Debug, Clone)]
pub struct CrossingDatum {
    pub t: f64,
    /// Orthonormal basis of `Υ(t*) ∩ X` in `R^{2N}`.
    pub basis: RMat,
    pub form: RMat,
    pub eigenvalues: Vec<f64>,
    pub n_plus: usize,
    pub n_minus: usize,
    pub regular: bool,
    pub eps_form: f64,
}

impl CrossingDatum {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn signature(&self) -> Result<i64> {
        if !self.regular {
            return Err(self.non_regular());
        }
        Ok(self.n_plus as i64 - self.n_minus as i64)
    }

    fn non_regular(&self) -> Error {
        let min_abs = self.eigenvalues.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
        Error::NonRegular { t: self.t, min_abs }
    }
}

/// Graph matrix of `Y(s)` over `Y0`: `Y(s) = {Y0 a + JY0 M a}`.
fn graph_matrix(space: &SymplecticSpace, y0: &RMat, path: &FramePath<'_>, s: f64) -> Result<RMat> {
    let y = linalg::orthonormalize(path(s)?.as_ref());
    let p = y0.transpose() * &y;
    let q = (space.j() * y0).transpose() * &y;
    let sv = linalg::singular_values(p.as_ref())?;
    if sv.last().copied().unwrap_or(0.0) < 1e-6 {
        return Err(Error::GraphBreakdown { t: s });
    }
    let m = q * linalg::inverse_r(p.as_ref());
    let norm = linalg::singular_values(m.as_ref())?[0];
    if norm > 1.0 {
        return Err(Error::GraphBreakdown { t: s });
    }
    Ok(m)
}

fn graph_derivative(
    space: &SymplecticSpace,
    y0: &RMat,
    path: &FramePath<'_>,
    t: f64,
    h: f64,
    domain: (f64, f64),
) -> Result<RMat> {
    let m = |s: f64| graph_matrix(space, y0, path, s);
    let central = t - h >= domain.0 && t + h <= domain.1;
    let d = |h: f64| -> Result<RMat> {
        if central {
            Ok((m(t + h)? - m(t - h)?) * (0.5 / h))
        } else {
            let sgn = if t + 2.0 * h <= domain.1 { 1.0 } else { -1.0 };
            let hs = sgn * h;
            let m0 = m(t)?;
            Ok((m(t + hs)? * 4.0 - m0 * 3.0 - m(t + 2.0 * hs)?) * (0.5 / hs))
        }
    };
    Ok((d(0.5 * h)? * 4.0 - d(h)?) * (1.0 / 3.0))
}

/// Crossing form `Q(u, v) = ω(u, Ḃv)` on `Υ(t*) ∩ X`, with `Ḃ` from a
/// Richardson-extrapolated difference of the graph operator over step `δ`.
/// Derivatives at the ends of `domain` are one-sided.
pub fn crossing_form(
    space: &SymplecticSpace,
    path: &FramePath<'_>,
    t_star: f64,
    x: &LagrangianFrame,
    delta: f64,
    domain: (f64, f64),
) -> Result<CrossingDatum> {
    let y0 = linalg::orthonormalize(path(t_star)?.as_ref());
    let beta = intersection_coords(&x.x, &y0, RANK_TOL)?;
    if beta.ncols() == 0 {
        return Err(Error::NotACrossing { t: t_star });
    }
    let md = graph_derivative(space, &y0, path, t_star, delta, domain)?;
    let mut form = beta.transpose() * &md * &beta;
    linalg::symmetrize_r(&mut form);
    Ok(datum(t_star, &y0 * &beta, form))
}

/// Classifies a form matrix with `ε_form = 1e-6·‖Q‖`.
pub fn datum(t: f64, basis: RMat, form: RMat) -> CrossingDatum {
    let eigenvalues = linalg::symmetric_eigenvalues(form.as_ref()).unwrap_or_default();
    let scale = eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let eps_form = 1e-6 * scale;
    let n_plus = eigenvalues.iter().filter(|&&e| e > eps_form).count();
    let n_minus = eigenvalues.iter().filter(|&&e| e < -eps_form).count();
    let regular = scale > 0.0 && n_plus + n_minus == eigenvalues.len();
    CrossingDatum { t, basis, form, eigenvalues, n_plus, n_minus, regular, eps_form }
}

/// Interior crossings (net eigenphase passages through `-1`) located by
/// bisection to width `t_tol`, plus crossings sitting on the endpoints.
#[derive(Debug, Clone, Default)]
pub struct CrossingLocations {
    pub interior: Vec<f64>,
    pub at_start: bool,
    pub at_end: bool,
}

pub fn locate_crossings(
    u: &(dyn Fn(f64) -> Result<CMat> + Sync),
    t0: f64,
    t1: f64,
    steps: usize,
    t_tol: f64,
) -> Result<CrossingLocations> {
    let steps = steps.max(1);
    let ts: Vec<f64> = (0..=steps).map(|i| t0 + (t1 - t0) * i as f64 / steps as f64).collect();
    let samples: Vec<(CMat, Vec<f64>)> = ts
        .iter()
        .map(|&t| {
            let m = u(t)?;
            let s = signed_angles(&m)?;
            Ok((m, s))
        })
        .collect::<Result<_>>()?;
    let near_zero = |s: &[f64]| s.iter().any(|x| x.abs() <= ENDPOINT_PHASE);
    let mut out = CrossingLocations {
        interior: Vec::new(),
        at_start: near_zero(&samples[0].1),
        at_end: near_zero(&samples[steps].1),
    };
    for i in 0..steps {
        locate_in(u, ts[i], &samples[i], ts[i + 1], &samples[i + 1], t_tol, &mut out.interior)?;
    }
    let tol = (t1 - t0).abs() * 1e-9 + t_tol;
    out.interior.retain(|&t| {
        let near_start = (t - t0).abs() <= tol;
        let near_end = (t - t1).abs() <= tol;
        !(near_start && out.at_start || near_end && out.at_end)
    });
    out.interior.dedup_by(|a, b| (*a - *b).abs() <= tol);
    Ok(out)
}

fn locate_in(
    u: &(dyn Fn(f64) -> Result<CMat> + Sync),
    a: f64,
    sa: &(CMat, Vec<f64>),
    b: f64,
    sb: &(CMat, Vec<f64>),
    t_tol: f64,
    out: &mut Vec<f64>,
) -> Result<()> {
    let all: Vec<f64> = sa.1.iter().chain(&sb.1).copied().collect();
    let (eps, margin) = choose_gap(&all);
    if margin <= 0.5 * PI * frob(&sa.0, &sb.0) {
        if b - a < MIN_STEP {
            return Err(Error::NoGapFound { t: a });
        }
        let mid = 0.5 * (a + b);
        let um = u(mid)?;
        let sm = (um.clone(), signed_angles(&um)?);
        locate_in(u, a, sa, mid, &sm, t_tol, out)?;
        return locate_in(u, mid, &sm, b, sb, t_tol, out);
    }
    bisect_count(u, eps, a, count_arc(&sa.1, eps), b, count_arc(&sb.1, eps), t_tol, out)
}

#[allow(clippy::too_many_arguments)]
fn bisect_count(
    u: &(dyn Fn(f64) -> Result<CMat> + Sync),
    eps: f64,
    a: f64,
    ka: i64,
    b: f64,
    kb: i64,
    t_tol: f64,
    out: &mut Vec<f64>,
) -> Result<()> {
    if ka == kb {
        return Ok(());
    }
    if b - a <= t_tol {
        out.push(0.5 * (a + b));
        return Ok(());
    }
    let mid = 0.5 * (a + b);
    let km = count_arc(&signed_angles(&u(mid)?)?, eps);
    bisect_count(u, eps, a, ka, mid, km, t_tol, out)?;
    bisect_count(u, eps, mid, km, b, kb, t_tol, out)
}

/// Maslov index from crossing forms together with the crossing data.
#[derive(Debug, Clone)]
pub struct MaslovCrossings {
    pub total: i64,
    pub crossings: Vec<CrossingDatum>,
    pub start: Option<CrossingDatum>,
    pub end: Option<CrossingDatum>,
}

/// `Σ sign Q` over interior crossings `+ n₊(t1) − n₋(t0)`.
pub fn maslov_crossing_forms(
    space: &SymplecticSpace,
    x: &LagrangianFrame,
    path: &FramePath<'_>,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<MaslovCrossings> {
    let u = souriau_path(space, x, path);
    let loc = locate_crossings(&u, t0, t1, steps, 1e-11)?;
    let delta = 1e-4 * (t1 - t0).abs().min(1.0);
    let domain = (t0, t1);
    let mut total = 0;
    let mut crossings = Vec::new();
    for &t in &loc.interior {
        let d = crossing_form(space, path, t, x, delta, domain)?;
        total += d.signature()?;
        crossings.push(d);
    }
    let start = if loc.at_start { Some(crossing_form(space, path, t0, x, delta, domain)?) } else { None };
    let end = if loc.at_end { Some(crossing_form(space, path, t1, x, delta, domain)?) } else { None };
    for (d, left) in [(&start, true), (&end, false)] {
        if let Some(d) = d {
            if !d.regular {
                return Err(d.non_regular());
            }
            total += if left { -(d.n_minus as i64) } else { d.n_plus as i64 };
        }
    }
    Ok(MaslovCrossings { total, crossings, start, end })
}

/// Seeded random Lagrangian planes and paths.
pub mod random {
    use rand::{Rng, RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    use super::*;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn gaussian(rng: &mut impl Rng) -> f64 {
        rng.sample(StandardNormal)
    }

    /// Haar-distributed unitary via Gram–Schmidt on a complex Gaussian matrix.
    pub fn unitary(n: usize, rng: &mut impl Rng) -> CMat {
        let mut cols: Vec<Vec<c64>> = Vec::with_capacity(n);
        for _ in 0..n {
            let mut v: Vec<c64> =
                (0..n).map(|_| cx(gaussian(rng), gaussian(rng)) * std::f64::consts::FRAC_1_SQRT_2).collect();
            for c in &cols {
                let p: c64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= p * ci;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for vi in &mut v {
                *vi /= norm;
            }
            cols.push(v);
        }
        Mat::from_fn(n, n, |i, j| cols[j][i])
    }

    /// Hermitian matrix with independent Gaussian entries.
    pub fn hermitian(n: usize, scale: f64, rng: &mut impl Rng) -> CMat {
        let mut h = Mat::from_fn(n, n, |_, _| cx(gaussian(rng), gaussian(rng)) * scale);
        linalg::hermitize(&mut h);
        h
    }

    /// Real orthogonal matrix.
    pub fn orthogonal(n: usize, rng: &mut impl Rng) -> RMat {
        let g = Mat::from_fn(n, n, |_, _| gaussian(rng));
        linalg::orthonormalize(g.as_ref())
    }

    /// `[Re W; Im W]`, Lagrangian for the standard structure.
    pub fn frame_of_unitary(w: &CMat) -> RMat {
        let n = w.nrows();
        Mat::from_fn(2 * n, n, |i, j| if i < n { w[(i, j)].re } else { w[(i - n, j)].im })
    }

    pub fn lagrangian(n: usize, rng: &mut impl Rng) -> RMat {
        frame_of_unitary(&unitary(n, rng))
    }

    /// `e^{iH}` for Hermitian `H`.
    pub fn exp_i_hermitian(h: &CMat) -> CMat {
        let (vals, vecs) = linalg::hermitian_eigen(h.as_ref()).expect("hermitian eigendecomposition");
        let n = vals.len();
        let d = Mat::from_fn(n, n, |i, j| if i == j { cx(vals[i].cos(), vals[i].sin()) } else { cx(0.0, 0.0) });
        &vecs * d * vecs.adjoint()
    }

    /// Smooth path `t ↦ [Re W(t); Im W(t)]` with
    /// `W(t) = exp(i(Σ_k t^{k+1} A_k + t(1-t)·B)) W₀`.
    #[derive(Debug, Clone)]
    pub struct RandomPath {
        pub w0: CMat,
        pub coeffs: Vec<CMat>,
        pub bump: Option<CMat>,
    }

    impl RandomPath {
        pub fn new(n: usize, degree: usize, scale: f64, rng: &mut impl Rng) -> Self {
            let w0 = unitary(n, rng);
            let coeffs = (0..degree.max(1)).map(|_| hermitian(n, scale, rng)).collect();
            RandomPath { w0, coeffs, bump: None }
        }

        /// Endpoint-fixed perturbation `t(1-t)·B`.
        pub fn perturbed(&self, scale: f64, rng: &mut impl Rng) -> Self {
            let n = self.w0.nrows();
            RandomPath { bump: Some(hermitian(n, scale, rng)), ..self.clone() }
        }

        pub fn unitary(&self, t: f64) -> CMat {
            let n = self.w0.nrows();
            let mut h = Mat::<c64>::zeros(n, n);
            let mut p = t;
            for a in &self.coeffs {
                h += a * faer::Scale(cx(p, 0.0));
                p *= t;
            }
            if let Some(b) = &self.bump {
                h += b * faer::Scale(cx(t * (1.0 - t), 0.0));
            }
            exp_i_hermitian(&h) * &self.w0
        }

        pub fn frame(&self, t: f64) -> RMat {
            frame_of_unitary(&self.unitary(t))
        }
    }

    /// A Lagrangian `Y` with `dim(X ∩ Y) = d` for `X = [Re U; Im U]`, built as
    /// `U·O₁·diag(1_d, e^{iφ})·O₂` with real orthogonal `O₁, O₂` and
    /// phases `φ` away from multiples of `π`.
    pub fn with_intersection(u: &CMat, d: usize, rng: &mut impl Rng) -> RMat {
        let n = u.nrows();
        let o1 = linalg::to_complex(orthogonal(n, rng).as_ref());
        let o2 = linalg::to_complex(orthogonal(n, rng).as_ref());
        let diag = Mat::from_fn(n, n, |i, j| {
            if i != j {
                cx(0.0, 0.0)
            } else if i < d {
                cx(1.0, 0.0)
            } else {
                let phi = rng.random_range(0.2..(PI - 0.2));
                cx(phi.cos(), phi.sin())
            }
        });
        frame_of_unitary(&(u * o1 * diag * o2))
    }
}
