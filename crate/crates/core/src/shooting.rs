//! One-dimensional boundary traces.
//!
//! For `n = 1` every solution of `-u'' + (t²V(tx) - λ)u = 0` on `[0, a₁]` is in
//! the kernel of the maximal operator, so the traces
//! `(u(0), u(a₁), u'(0), u'(a₁))` of the full solution space form a Lagrangian
//! plane in an `8m`-dimensional real space. Complex `m`-vectors are realified
//! with interleaved real and imaginary parts.

use std::f64::consts::PI;

use faer::Mat;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, cx, CMat, RMat};
use crate::potential::PotentialSpec;
use crate::spectral::BoundaryCondition;
use crate::symplectic::{self, CrossingDatum, LagrangianFrame, SymplecticSpace};

const RICHARDSON_TOL: f64 = 1e-7;

/// Trace space `(u(0), u(a₁), u'(0), u'(a₁)) ∈ (R^{2m})⁴` with
/// `ω(z, w) = ⟨z_{u1}, w_{p1}⟩ - ⟨z_{p1}, w_{u1}⟩ - ⟨z_{u0}, w_{p0}⟩ + ⟨z_{p0}, w_{u0}⟩`.
#[derive(Debug, Clone)]
pub struct TraceSpace {
    m: usize,
    space: SymplecticSpace,
}

impl TraceSpace {
    pub fn new(m: usize) -> Self {
        let r = 2 * m;
        let mut j = Mat::<f64>::zeros(4 * r, 4 * r);
        for i in 0..r {
            let (u0, u1, p0, p1) = (i, r + i, 2 * r + i, 3 * r + i);
            j[(p1, u1)] = 1.0;
            j[(u1, p1)] = -1.0;
            j[(p0, u0)] = -1.0;
            j[(u0, p0)] = 1.0;
        }
        TraceSpace { m, space: SymplecticSpace::from_j(j).expect("trace structure") }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    /// Reference plane encoding the boundary condition.
    pub fn reference_plane(&self, bc: &BoundaryCondition) -> Result<LagrangianFrame> {
        let r = 2 * self.m;
        let mut x = Mat::<f64>::zeros(4 * r, 2 * r);
        match bc {
            BoundaryCondition::Theta(th) => {
                if th.len() != 1 {
                    return Err(Error::DimensionMismatch("one-dimensional traces need a scalar theta".into()));
                }
                let (c, s) = ((2.0 * PI * th[0]).cos(), (2.0 * PI * th[0]).sin());
                let rot = |i: usize, k: usize| -> f64 {
                    if i / 2 != k / 2 {
                        return 0.0;
                    }
                    match (i % 2, k % 2) {
                        (0, 0) | (1, 1) => c,
                        (0, 1) => -s,
                        _ => s,
                    }
                };
                for k in 0..r {
                    x[(k, k)] = 1.0;
                    x[(2 * r + k, r + k)] = 1.0;
                    for i in 0..r {
                        x[(r + i, k)] = rot(i, k);
                        x[(3 * r + i, r + k)] = rot(i, k);
                    }
                }
            }
            BoundaryCondition::Dirichlet => {
                for k in 0..2 * r {
                    x[(2 * r + k, k)] = 1.0;
                }
            }
            BoundaryCondition::Neumann => {
                for k in 0..2 * r {
                    x[(k, k)] = 1.0;
                }
            }
        }
        LagrangianFrame::new(&self.space, &x)
    }
}

/// Fundamental solutions at one `(t, λ)`.
#[derive(Debug, Clone)]
pub struct SolutionBundle {
    pub t: f64,
    pub lambda: f64,
    pub steps: usize,
    /// Real `2m×2m` fundamental matrix at `x = a₁` for `(u, u')`.
    pub fundamental: RMat,
    /// Realified traces of all solutions, `8m×4m`.
    pub frame: RMat,
    /// Largest trace change under step doubling.
    pub error_estimate: f64,
}

fn cell_length(v: &PotentialSpec) -> Result<f64> {
    let lat = v.lattice();
    if lat.dim() != 1 {
        return Err(Error::UnsupportedLattice("shooting needs a one-dimensional cell".into()));
    }
    let a = lat.basis()[0][0];
    if a <= 0.0 {
        return Err(Error::UnsupportedLattice("shooting needs a positive period vector".into()));
    }
    Ok(a)
}

/// Classical RK4 for `Φ' = [[0, I], [W - λ, 0]]Φ`, `Φ(0) = I`. When `keep` is
/// set, `Φ` is returned at every node.
fn integrate(v: &PotentialSpec, t: f64, lambda: f64, steps: usize, keep: bool) -> Result<(RMat, Vec<RMat>)> {
    let a = cell_length(v)?;
    let m = v.m();
    let h = a / steps as f64;
    let coeff = |x: f64| -> Result<RMat> {
        let w = v.eval_scaled(t, &[x])?;
        Ok(Mat::from_fn(2 * m, 2 * m, |i, j| {
            if i < m {
                if j == i + m {
                    1.0
                } else {
                    0.0
                }
            } else if j < m {
                w[(i - m, j)] - if i - m == j { lambda } else { 0.0 }
            } else {
                0.0
            }
        }))
    };
    let mut phi = linalg::identity_r(2 * m);
    let mut nodes = Vec::new();
    if keep {
        nodes.push(phi.clone());
    }
    let mut a0 = coeff(0.0)?;
    for k in 0..steps {
        let x = k as f64 * h;
        let am = coeff(x + 0.5 * h)?;
        let a1 = coeff(if k + 1 == steps { a } else { x + h })?;
        let k1 = &a0 * &phi;
        let k2 = &am * (&phi + &k1 * (0.5 * h));
        let k3 = &am * (&phi + &k2 * (0.5 * h));
        let k4 = &a1 * (&phi + &k3 * h);
        phi = &phi + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if keep {
            nodes.push(phi.clone());
        }
        a0 = a1;
    }
    Ok((phi, nodes))
}

fn trace_frame(phi: &RMat) -> RMat {
    let r = phi.nrows();
    let m = r / 2;
    let traces = Mat::from_fn(2 * r, r, |i, j| {
        if i < m {
            if i == j {
                1.0
            } else {
                0.0
            }
        } else if i < 2 * m {
            phi[(i - m, j)]
        } else if i < 3 * m {
            if i - 2 * m + m == j {
                1.0
            } else {
                0.0
            }
        } else {
            phi[(i - 3 * m + m, j)]
        }
    });
    linalg::kron_i2(traces.as_ref())
}

/// Number of RK4 steps resolving the fastest local frequency.
pub fn default_steps(v: &PotentialSpec, lambda: f64) -> Result<usize> {
    let a = cell_length(v)?;
    let omega = (v.sup_norm()? + lambda.abs()).sqrt();
    let steps = (400.0 * (1.0 + omega * a)).ceil() as usize;
    Ok(steps.max(64) + steps % 2)
}

/// Fundamental solutions with a step-doubling check.
pub fn fundamental_solutions(v: &PotentialSpec, t: f64, lambda: f64, steps: usize) -> Result<SolutionBundle> {
    if steps < 64 {
        return Err(Error::StepTooCoarse { change: f64::INFINITY });
    }
    let (phi, _) = integrate(v, t, lambda, steps, false)?;
    let (fine, _) = integrate(v, t, lambda, 2 * steps, false)?;
    let scale = linalg::max_abs_r(phi.as_ref()).max(1.0);
    let change = linalg::max_abs_r((&fine - &phi).as_ref());
    if change > RICHARDSON_TOL * scale {
        return Err(Error::StepTooCoarse { change });
    }
    Ok(SolutionBundle { t, lambda, steps, frame: trace_frame(&phi), fundamental: phi, error_estimate: change })
}

/// The trace path `t ↦ γ(ker(-∂² + t²V(tx) - λ))` at a fixed step count.
#[derive(Debug, Clone)]
pub struct TracePath {
    pub v: PotentialSpec,
    pub lambda: f64,
    pub steps: usize,
}

impl TracePath {
    /// Chooses the step count and validates it by step doubling at the ends.
    pub fn new(v: &PotentialSpec, lambda: f64, t_range: (f64, f64)) -> Result<Self> {
        let mut steps = default_steps(v, lambda)?;
        loop {
            let ok = fundamental_solutions(v, t_range.1, lambda, steps)
                .and_then(|_| fundamental_solutions(v, t_range.0, lambda, steps));
            match ok {
                Ok(_) => break,
                Err(Error::StepTooCoarse { .. }) if steps < 1 << 20 => steps *= 2,
                Err(e) => return Err(e),
            }
        }
        Ok(TracePath { v: v.clone(), lambda, steps })
    }

    pub fn frame(&self, t: f64) -> Result<RMat> {
        let (phi, _) = integrate(&self.v, t, self.lambda, self.steps, false)?;
        Ok(trace_frame(&phi))
    }

    pub fn fundamental(&self, t: f64) -> Result<RMat> {
        Ok(integrate(&self.v, t, self.lambda, self.steps, false)?.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    SpectralFlow,
    CrossingForms,
}

/// One conjugate point of the trace path.
#[derive(Debug, Clone, Serialize)]
pub struct ShootingCrossing {
    pub t: f64,
    pub dim_real: usize,
    /// Eigenvalues of the finite-difference crossing form.
    pub form: Vec<f64>,
    /// Eigenvalues of `a₁[t(u, V(ta₁)u) - t⁻¹|u'(a₁)|²]` on the same basis.
    pub closed_form: Vec<f64>,
    pub n_plus: usize,
    pub n_minus: usize,
    pub endpoint: Option<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Maslov1d {
    pub route: Route,
    pub maslov: i64,
    pub crossings: Vec<ShootingCrossing>,
}

/// Closed-form boundary value on trace vectors `z_a`, as a symmetric matrix.
fn closed_form_matrix(v: &PotentialSpec, t: f64, basis: &RMat) -> Result<RMat> {
    let a = cell_length(v)?;
    let m = v.m();
    let r = 2 * m;
    let vr = linalg::kron_i2(v.eval(&[t * a])?.as_ref());
    let d = basis.ncols();
    let mut q = Mat::<f64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut pot = 0.0;
            let mut kin = 0.0;
            for k in 0..r {
                let ui = basis[(r + k, i)];
                let pi = basis[(3 * r + k, i)];
                let pj = basis[(3 * r + k, j)];
                kin += pi * pj;
                for l in 0..r {
                    pot += ui * vr[(k, l)] * basis[(r + l, j)];
                }
            }
            q[(i, j)] = a * (t * pot - kin / t);
        }
    }
    linalg::symmetrize_r(&mut q);
    Ok(q)
}

fn report(v: &PotentialSpec, d: &CrossingDatum, endpoint: Option<&'static str>) -> Result<ShootingCrossing> {
    let closed = closed_form_matrix(v, d.t, &d.basis)?;
    Ok(ShootingCrossing {
        t: d.t,
        dim_real: d.dim(),
        form: d.eigenvalues.clone(),
        closed_form: linalg::symmetric_eigenvalues(closed.as_ref())?,
        n_plus: d.n_plus,
        n_minus: d.n_minus,
        endpoint,
    })
}

/// Maslov index of the trace path on `[τ, 1]` against the boundary-condition
/// plane, by either route.
pub fn maslov_1d(v: &PotentialSpec, bc: &BoundaryCondition, tau: f64, route: Route) -> Result<Maslov1d> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::config("solver.tau", "must lie in (0, 1)"));
    }
    let ts = TraceSpace::new(v.m());
    let x = ts.reference_plane(bc)?;
    let tp = TracePath::new(v, 0.0, (tau, 1.0))?;
    let path = |t: f64| tp.frame(t);
    let grid_steps = 64;
    match route {
        Route::SpectralFlow => {
            let maslov = symplectic::maslov_spectral_flow(ts.space(), &x, &path, tau, 1.0, grid_steps)?;
            Ok(Maslov1d { route, maslov, crossings: Vec::new() })
        }
        Route::CrossingForms => {
            let mc = symplectic::maslov_crossing_forms(ts.space(), &x, &path, tau, 1.0, grid_steps)?;
            let mut crossings = Vec::new();
            if let Some(d) = &mc.start {
                crossings.push(report(v, d, Some("start"))?);
            }
            for d in &mc.crossings {
                crossings.push(report(v, d, None)?);
            }
            if let Some(d) = &mc.end {
                crossings.push(report(v, d, Some("end"))?);
            }
            Ok(Maslov1d { route, maslov: mc.total, crossings })
        }
    }
}

/// Roots closer than this are one crossing split by integration error.
const MERGE_TOL: f64 = 1e-8;

/// Refines a conjugate point of the trace path inside `[lo, hi]`.
pub fn refine_crossing(v: &PotentialSpec, bc: &BoundaryCondition, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let ts = TraceSpace::new(v.m());
    let x = ts.reference_plane(bc)?;
    let tp = TracePath::new(v, 0.0, (lo, hi))?;
    let path = |t: f64| tp.frame(t);
    let u = symplectic::souriau_path(ts.space(), &x, &path);
    let loc = symplectic::locate_crossings(&u, lo, hi, 4, 1e-13)?;
    let mut out = loc.interior;
    out.dedup_by(|a, b| (*a - *b).abs() <= MERGE_TOL);
    if loc.at_start {
        out.insert(0, lo);
    }
    if loc.at_end {
        out.push(hi);
    }
    Ok(out)
}

/// Complex kernel of the boundary-value problem at `t`, reconstructed from
/// shooting, with both crossing-form evaluations.
#[derive(Debug, Clone)]
pub struct Kernel1d {
    pub t: f64,
    pub dim_complex: usize,
    /// Volume form `∫(u_a, D_t u_b)` on an `L²`-orthonormal kernel basis.
    pub volume_form: CMat,
    /// Boundary form `a₁[t(u_a, V(ta₁)u_b) - t⁻¹(u_a', u_b')](a₁)` on the same basis.
    pub boundary_form: CMat,
}

fn boundary_constraint(phi: &RMat, bc: &BoundaryCondition) -> Result<CMat> {
    let r = phi.nrows();
    let m = r / 2;
    Ok(match bc {
        BoundaryCondition::Theta(th) => {
            let e = cx((2.0 * PI * th[0]).cos(), (2.0 * PI * th[0]).sin());
            Mat::from_fn(r, r, |i, j| cx(phi[(i, j)], 0.0) - if i == j { e } else { cx(0.0, 0.0) })
        }
        BoundaryCondition::Dirichlet => Mat::from_fn(m, m, |i, j| cx(phi[(i, m + j)], 0.0)),
        BoundaryCondition::Neumann => Mat::from_fn(m, m, |i, j| cx(phi[(m + i, j)], 0.0)),
    })
}

/// Initial data `(u(0), u'(0))` of the kernel for each null vector.
fn initial_data(null: &CMat, bc: &BoundaryCondition, m: usize) -> Vec<Vec<c64>> {
    (0..null.ncols())
        .map(|k| {
            let col: Vec<c64> = (0..null.nrows()).map(|i| null[(i, k)]).collect();
            match bc {
                BoundaryCondition::Theta(_) => col,
                BoundaryCondition::Dirichlet => {
                    (0..2 * m).map(|i| if i < m { cx(0.0, 0.0) } else { col[i - m] }).collect()
                }
                BoundaryCondition::Neumann => (0..2 * m).map(|i| if i < m { col[i] } else { cx(0.0, 0.0) }).collect(),
            }
        })
        .collect()
}

/// Kernel of `-∂² + t²V(tx)` under `bc` at `t`, with singular-value
/// tolerance `tol` on the boundary constraint.
pub fn kernel_1d(v: &PotentialSpec, bc: &BoundaryCondition, t: f64, steps: usize, tol: f64) -> Result<Kernel1d> {
    let a = cell_length(v)?;
    let m = v.m();
    let (phi, nodes) = integrate(v, t, 0.0, steps, true)?;
    let c = boundary_constraint(&phi, bc)?;
    let null = linalg::null_space_c(c.as_ref(), tol)?;
    let data = initial_data(&null, bc, m);
    let d = data.len();
    let h = a / steps as f64;
    let sol = |node: &RMat, y: &[c64]| -> Vec<c64> {
        (0..2 * m).map(|i| (0..2 * m).map(|j| y[j] * node[(i, j)]).sum()).collect()
    };
    let simpson = |k: usize| -> f64 {
        if k == 0 || k == steps {
            h / 3.0
        } else if k % 2 == 1 {
            4.0 * h / 3.0
        } else {
            2.0 * h / 3.0
        }
    };
    let mut gram = Mat::<c64>::zeros(d, d);
    let mut vol = Mat::<c64>::zeros(d, d);
    for (k, node) in nodes.iter().enumerate() {
        let x = k as f64 * h;
        let dt = v.radial_derivative_at(t, &[x])?;
        let vals: Vec<Vec<c64>> = data.iter().map(|y| sol(node, y)).collect();
        let w = simpson(k);
        for p in 0..d {
            for q in 0..d {
                let mut g = cx(0.0, 0.0);
                let mut f = cx(0.0, 0.0);
                for i in 0..m {
                    g += vals[p][i].conj() * vals[q][i];
                    for j in 0..m {
                        f += vals[p][i].conj() * vals[q][j] * dt[(i, j)];
                    }
                }
                gram[(p, q)] += g * w;
                vol[(p, q)] += f * w;
            }
        }
    }
    let end: Vec<Vec<c64>> = data.iter().map(|y| sol(&phi, y)).collect();
    let vend = v.eval(&[t * a])?;
    let mut bdy = Mat::<c64>::zeros(d, d);
    for p in 0..d {
        for q in 0..d {
            let mut pot = cx(0.0, 0.0);
            let mut kin = cx(0.0, 0.0);
            for i in 0..m {
                kin += end[p][m + i].conj() * end[q][m + i];
                for j in 0..m {
                    pot += end[p][i].conj() * end[q][j] * vend[(i, j)];
                }
            }
            bdy[(p, q)] = (pot * t - kin / t) * a;
        }
    }
    let (volume_form, boundary_form) = if d > 0 {
        let s = linalg::inv_sqrt_hermitian(gram.as_ref())?;
        let mut vf = s.adjoint() * &vol * &s;
        let mut bf = s.adjoint() * &bdy * &s;
        linalg::hermitize(&mut vf);
        linalg::hermitize(&mut bf);
        (vf, bf)
    } else {
        (vol, bdy)
    };
    Ok(Kernel1d { t, dim_complex: d, volume_form, boundary_form })
}

/// Real kernel dimension at `t` from the trace plane intersection.
pub fn real_kernel_dim(v: &PotentialSpec, bc: &BoundaryCondition, t: f64, steps: usize) -> Result<usize> {
    let ts = TraceSpace::new(v.m());
    let x = ts.reference_plane(bc)?;
    let (phi, _) = integrate(v, t, 0.0, steps, false)?;
    let y = LagrangianFrame::new(ts.space(), &trace_frame(&phi))?;
    symplectic::intersection_dim(&x, &y)
}
