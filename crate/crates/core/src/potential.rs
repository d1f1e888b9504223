//! Matrix potentials `V`, the rescaled family `V_t(x) = t²V(tx)` and its
//! `t`-derivative `D_t(x) = 2tV(tx) + t²∇V(tx)·x`.
//!
//! Fourier coefficients follow the convention
//! `Ŵ(q) = |Q|⁻¹ ∫_Q W(x) e^{-iAᵀq·x} dx`.

use std::f64::consts::PI;

use faer::Mat;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{CellGrid, Lattice};
use crate::linalg::{self, c64, cx, CMat, RMat};
use crate::transform::{e0, e1};

#[derive(Debug, Clone)]
pub struct FourierTerm {
    pub q: Vec<i64>,
    pub coeff: CMat,
}

/// Samples of `V` (and optionally `∇V`) at the nodes of a midpoint [`CellGrid`].
#[derive(Debug, Clone)]
pub struct GridSamples {
    pub resolution: usize,
    pub values: Vec<RMat>,
    pub gradients: Option<Vec<Vec<RMat>>>,
}

#[derive(Debug, Clone)]
pub enum Variant {
    Constant(RMat),
    Fourier(Vec<FourierTerm>),
    Grid(GridSamples),
}

#[derive(Debug, Clone)]
pub struct PotentialSpec {
    lattice: Lattice,
    m: usize,
    variant: Variant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    /// `D_t(x)` positive definite at every sample.
    Positive,
    /// `D_t(x)` negative definite at every sample.
    Negative,
    Neither,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub class: Hypothesis,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub margin: f64,
}

/// `D_t` sampled on a grid.
#[derive(Debug, Clone)]
pub struct RadialDerivative {
    pub t: f64,
    pub values: Vec<RMat>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Table of `∫_{[0,1]^n} F(s) e^{iπν·s} ds` over a box of integer `ν`.
#[derive(Debug, Clone)]
pub(crate) struct TransformTable {
    nu_max: Vec<i64>,
    m: usize,
    data: Vec<c64>,
}

impl TransformTable {
    fn offset(&self, nu: &[i64]) -> usize {
        let mut idx = 0usize;
        for (j, &v) in nu.iter().enumerate() {
            let w = (2 * self.nu_max[j] + 1) as usize;
            idx = idx * w + (v + self.nu_max[j]) as usize;
        }
        idx * self.m * self.m
    }

    pub(crate) fn get(&self, nu: &[i64]) -> &[c64] {
        let o = self.offset(nu);
        &self.data[o..o + self.m * self.m]
    }
}

fn check_symmetric(s: &RMat, what: &str) -> Result<()> {
    let scale = linalg::max_abs_r(s.as_ref()).max(1.0);
    for i in 0..s.nrows() {
        for j in 0..s.ncols() {
            if (s[(i, j)] - s[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::InvalidPotential(format!("{what} is not symmetric")));
            }
        }
    }
    Ok(())
}

fn box_points(max: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &k in max {
        let mut next = Vec::new();
        for p in &out {
            for v in -k..=k {
                let mut p2 = p.clone();
                p2.push(v);
                next.push(p2);
            }
        }
        out = next;
    }
    out
}

impl PotentialSpec {
    pub fn constant(lattice: &Lattice, s: RMat) -> Result<Self> {
        if s.nrows() != s.ncols() || s.nrows() == 0 {
            return Err(Error::InvalidPotential("constant value must be square".into()));
        }
        check_symmetric(&s, "constant value")?;
        Ok(PotentialSpec { lattice: lattice.clone(), m: s.nrows(), variant: Variant::Constant(s) })
    }

    /// Scalar constant potential `c`.
    pub fn scalar(lattice: &Lattice, c: f64) -> Self {
        PotentialSpec::constant(lattice, Mat::from_fn(1, 1, |_, _| c)).expect("scalar potential")
    }

    /// Trigonometric polynomial `Σ V̂(q) e^{iAᵀq·x}`; requires
    /// `V̂(-q) = conj V̂(q)` and `V̂(q) = V̂(q)ᵀ`.
    pub fn fourier(lattice: &Lattice, m: usize, terms: Vec<FourierTerm>) -> Result<Self> {
        let n = lattice.dim();
        let mut merged: Vec<FourierTerm> = Vec::new();
        for t in terms {
            if t.q.len() != n || t.coeff.nrows() != m || t.coeff.ncols() != m {
                return Err(Error::InvalidPotential(format!("coefficient {:?} has the wrong shape", t.q)));
            }
            match merged.iter_mut().find(|u| u.q == t.q) {
                Some(u) => u.coeff = &u.coeff + &t.coeff,
                None => merged.push(t),
            }
        }
        merged.sort_by(|a, b| a.q.cmp(&b.q));
        let scale = merged.iter().map(|t| linalg::max_abs_c(t.coeff.as_ref())).fold(1.0, f64::max);
        let tol = 1e-12 * scale;
        let zero = Mat::<c64>::zeros(m, m);
        for t in &merged {
            let neg: Vec<i64> = t.q.iter().map(|x| -x).collect();
            let partner = merged.iter().find(|u| u.q == neg).map(|u| &u.coeff).unwrap_or(&zero);
            for i in 0..m {
                for j in 0..m {
                    if (t.coeff[(i, j)] - t.coeff[(j, i)]).norm() > tol {
                        return Err(Error::InvalidPotential(format!("coefficient {:?} is not symmetric", t.q)));
                    }
                    if (partner[(i, j)] - t.coeff[(i, j)].conj()).norm() > tol {
                        return Err(Error::InvalidPotential(format!(
                            "coefficients {:?} and {:?} are not conjugate",
                            t.q, neg
                        )));
                    }
                }
            }
        }
        Ok(PotentialSpec { lattice: lattice.clone(), m, variant: Variant::Fourier(merged) })
    }

    /// Scalar cosine mode `c + a cos(Aᵀq·x) I_m`.
    pub fn scalar_cosine(lattice: &Lattice, m: usize, c: f64, a: f64, q: Vec<i64>) -> Result<Self> {
        let n = lattice.dim();
        let diag = |v: f64| Mat::from_fn(m, m, |i, j| if i == j { cx(v, 0.0) } else { cx(0.0, 0.0) });
        let neg = q.iter().map(|x| -x).collect();
        PotentialSpec::fourier(
            lattice,
            m,
            vec![
                FourierTerm { q: vec![0; n], coeff: diag(c) },
                FourierTerm { q, coeff: diag(a / 2.0) },
                FourierTerm { q: neg, coeff: diag(a / 2.0) },
            ],
        )
    }

    /// Samples on the midpoint grid of the given resolution; gradients optional.
    pub fn grid_sampled(
        lattice: &Lattice,
        resolution: usize,
        values: Vec<RMat>,
        gradients: Option<Vec<Vec<RMat>>>,
    ) -> Result<Self> {
        let expected = resolution.pow(lattice.dim() as u32);
        if values.len() != expected || values.is_empty() {
            return Err(Error::InvalidPotential(format!("expected {expected} samples")));
        }
        let m = values[0].nrows();
        for v in &values {
            if v.nrows() != m || v.ncols() != m {
                return Err(Error::InvalidPotential("sample shapes differ".into()));
            }
            check_symmetric(v, "sample")?;
        }
        if let Some(g) = &gradients {
            if g.len() != expected || g.iter().any(|gi| gi.len() != lattice.dim()) {
                return Err(Error::InvalidPotential("gradient samples have the wrong shape".into()));
            }
        }
        Ok(PotentialSpec {
            lattice: lattice.clone(),
            m,
            variant: Variant::Grid(GridSamples { resolution, values, gradients }),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    pub fn has_gradient(&self) -> bool {
        !matches!(&self.variant, Variant::Grid(g) if g.gradients.is_none())
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.variant, Variant::Constant(_))
    }

    fn check_domain(&self, x: &[f64]) -> Result<Vec<f64>> {
        let s = self.lattice.to_lattice(x);
        if let Variant::Grid(_) = self.variant {
            if s.iter().any(|&v| !(-1e-12..=1.0 + 1e-12).contains(&v)) {
                return Err(Error::OutOfCell { point: x.to_vec() });
            }
        }
        Ok(s)
    }

    fn interpolate(&self, g: &GridSamples, s: &[f64], pick: impl Fn(usize) -> RMat) -> RMat {
        let r = g.resolution;
        let n = s.len();
        let mut lo = vec![0usize; n];
        let mut frac = vec![0.0; n];
        for j in 0..n {
            let p = (s[j] * r as f64 - 0.5).clamp(0.0, (r - 1) as f64);
            let i = (p.floor() as usize).min(r.saturating_sub(2));
            lo[j] = i;
            frac[j] = if r > 1 { p - i as f64 } else { 0.0 };
        }
        let mut out = Mat::<f64>::zeros(self.m, self.m);
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut idx = 0usize;
            for j in 0..n {
                let up = (corner >> j) & 1 == 1;
                let i = if up && r > 1 { lo[j] + 1 } else { lo[j] };
                w *= if up { frac[j] } else { 1.0 - frac[j] };
                idx = idx * r + i;
            }
            if w != 0.0 {
                out += pick(idx) * w;
            }
        }
        out
    }

    /// `V(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<RMat> {
        let s = self.check_domain(x)?;
        Ok(match &self.variant {
            Variant::Constant(c) => c.clone(),
            Variant::Fourier(terms) => {
                let mut out = Mat::<f64>::zeros(self.m, self.m);
                for t in terms {
                    let ph: f64 = 2.0 * PI * t.q.iter().zip(&s).map(|(&q, &s)| q as f64 * s).sum::<f64>();
                    let e = cx(ph.cos(), ph.sin());
                    for i in 0..self.m {
                        for j in 0..self.m {
                            out[(i, j)] += (t.coeff[(i, j)] * e).re;
                        }
                    }
                }
                linalg::symmetrize_r(&mut out);
                out
            }
            Variant::Grid(g) => self.interpolate(g, &s, |i| g.values[i].clone()),
        })
    }

    /// `∂_l V(x)` for each Cartesian direction `l`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<RMat>> {
        let s = self.check_domain(x)?;
        let n = self.lattice.dim();
        Ok(match &self.variant {
            Variant::Constant(_) => vec![Mat::zeros(self.m, self.m); n],
            Variant::Fourier(terms) => {
                let mut out = vec![Mat::<f64>::zeros(self.m, self.m); n];
                for t in terms {
                    let qf: Vec<f64> = t.q.iter().map(|&q| q as f64).collect();
                    let xi = self.lattice.a_transpose_apply(&qf);
                    let ph: f64 = 2.0 * PI * qf.iter().zip(&s).map(|(q, s)| q * s).sum::<f64>();
                    let e = cx(ph.cos(), ph.sin());
                    for (l, o) in out.iter_mut().enumerate() {
                        let f = e * cx(0.0, xi[l]);
                        for i in 0..self.m {
                            for j in 0..self.m {
                                o[(i, j)] += (t.coeff[(i, j)] * f).re;
                            }
                        }
                    }
                }
                out
            }
            Variant::Grid(g) => {
                let grads = g.gradients.as_ref().ok_or(Error::NoGradient)?;
                (0..n).map(|l| self.interpolate(g, &s, |i| grads[i][l].clone())).collect()
            }
        })
    }

    /// `t²V(tx)`.
    pub fn eval_scaled(&self, t: f64, x: &[f64]) -> Result<RMat> {
        let y: Vec<f64> = x.iter().map(|v| t * v).collect();
        Ok(self.eval(&y)? * (t * t))
    }

    /// `D_t(x) = 2tV(tx) + t² ∇V(tx)·x`.
    pub fn radial_derivative_at(&self, t: f64, x: &[f64]) -> Result<RMat> {
        let y: Vec<f64> = x.iter().map(|v| t * v).collect();
        let g = self.gradient(&y)?;
        let mut d = self.eval(&y)? * (2.0 * t);
        for (l, gl) in g.iter().enumerate() {
            d += gl * (t * t * x[l]);
        }
        linalg::symmetrize_r(&mut d);
        Ok(d)
    }

    pub fn radial_derivative(&self, t: f64, grid: &CellGrid) -> Result<RadialDerivative> {
        let mut values = Vec::with_capacity(grid.len());
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for x in &grid.nodes {
            let d = self.radial_derivative_at(t, x)?;
            let ev = linalg::symmetric_eigenvalues(d.as_ref())?;
            lo = lo.min(ev[0]);
            hi = hi.max(ev[ev.len() - 1]);
            values.push(d);
        }
        Ok(RadialDerivative { t, values, min_eigenvalue: lo, max_eigenvalue: hi })
    }

    /// Classifies the sign of `D_t` over the sampled `t` values and grid.
    pub fn hypothesis_check(&self, t_samples: &[f64], grid: &CellGrid) -> Result<HypothesisReport> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &t in t_samples {
            let r = self.radial_derivative(t, grid)?;
            lo = lo.min(r.min_eigenvalue);
            hi = hi.max(r.max_eigenvalue);
        }
        let (class, margin) = if lo > 0.0 {
            (Hypothesis::Positive, lo)
        } else if hi < 0.0 {
            (Hypothesis::Negative, hi)
        } else {
            (Hypothesis::Neither, if lo.abs() < hi.abs() { lo } else { hi })
        };
        Ok(HypothesisReport { class, min_eigenvalue: lo, max_eigenvalue: hi, margin })
    }

    /// `V ⊗ I₂`.
    pub fn realify(&self) -> PotentialSpec {
        let variant = match &self.variant {
            Variant::Constant(c) => Variant::Constant(linalg::kron_i2(c.as_ref())),
            Variant::Fourier(terms) => Variant::Fourier(
                terms
                    .iter()
                    .map(|t| FourierTerm {
                        q: t.q.clone(),
                        coeff: Mat::from_fn(2 * self.m, 2 * self.m, |i, j| {
                            if i % 2 == j % 2 {
                                t.coeff[(i / 2, j / 2)]
                            } else {
                                cx(0.0, 0.0)
                            }
                        }),
                    })
                    .collect(),
            ),
            Variant::Grid(g) => Variant::Grid(GridSamples {
                resolution: g.resolution,
                values: g.values.iter().map(|v| linalg::kron_i2(v.as_ref())).collect(),
                gradients: g
                    .gradients
                    .as_ref()
                    .map(|gs| gs.iter().map(|gi| gi.iter().map(|v| linalg::kron_i2(v.as_ref())).collect()).collect()),
            }),
        };
        PotentialSpec { lattice: self.lattice.clone(), m: 2 * self.m, variant }
    }

    /// Number of negative eigenvalues of `V(0)`.
    pub fn origin_morse(&self) -> Result<usize> {
        let v0 = self.eval(&vec![0.0; self.lattice.dim()])?;
        let ev = linalg::symmetric_eigenvalues(v0.as_ref())?;
        let scale = ev.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        Ok(ev.iter().filter(|&&x| x < -1e-12 * scale).count())
    }

    /// Smallest `|eigenvalue|` of `V(0)`.
    pub fn origin_gap(&self) -> Result<f64> {
        let v0 = self.eval(&vec![0.0; self.lattice.dim()])?;
        let ev = linalg::symmetric_eigenvalues(v0.as_ref())?;
        Ok(ev.iter().fold(f64::INFINITY, |m, x| m.min(x.abs())))
    }

    /// `sup_{x∈Q} ‖V(x)‖`, which equals `sup_{t∈(0,1]} ‖V_t‖_∞`; sampled for
    /// non-constant potentials.
    pub fn sup_norm(&self) -> Result<f64> {
        let grid = match &self.variant {
            Variant::Constant(_) => CellGrid::new(&self.lattice, 1),
            _ => CellGrid::new(&self.lattice, if self.lattice.dim() == 1 { 512 } else { 64 }),
        };
        let mut sup = 0.0f64;
        for x in &grid.nodes {
            let v = self.eval(x)?;
            let ev = linalg::symmetric_eigenvalues(v.as_ref())?;
            sup = sup.max(ev[0].abs()).max(ev[ev.len() - 1].abs());
        }
        if let Variant::Grid(g) = &self.variant {
            for v in &g.values {
                let ev = linalg::symmetric_eigenvalues(v.as_ref())?;
                sup = sup.max(ev[0].abs()).max(ev[ev.len() - 1].abs());
            }
        }
        Ok(sup)
    }

    /// A rigorous upper bound for `sup_x ‖V(x)‖` where available.
    pub fn norm_bound(&self) -> Result<f64> {
        Ok(match &self.variant {
            Variant::Constant(_) => self.sup_norm()?,
            Variant::Fourier(terms) => terms
                .iter()
                .map(|t| {
                    let mut f = 0.0;
                    for i in 0..self.m {
                        for j in 0..self.m {
                            f += t.coeff[(i, j)].norm_sqr();
                        }
                    }
                    f.sqrt()
                })
                .sum(),
            Variant::Grid(_) => self.sup_norm()? * 1.05,
        })
    }

    /// Resolution of the sample grid for [`Variant::Grid`], otherwise `None`.
    pub fn sample_resolution(&self) -> Option<usize> {
        match &self.variant {
            Variant::Grid(g) => Some(g.resolution),
            _ => None,
        }
    }

    /// `Ŵ(q)` for `W = V_t`. Exact for constant and Fourier potentials; grid
    /// potentials use midpoint quadrature on `grid`.
    pub fn fourier_coeff(&self, t: f64, q: &[i64], grid: &CellGrid) -> Result<CMat> {
        let nu: Vec<i64> = q.iter().map(|&v| -2 * v).collect();
        match &self.variant {
            Variant::Grid(_) => self.quadrature_transform(t, &nu, false, grid),
            _ => Ok(self.analytic_transform(t, &nu, false)),
        }
    }

    fn analytic_transform(&self, t: f64, nu: &[i64], derivative: bool) -> CMat {
        let m = self.m;
        let n = self.lattice.dim();
        let zero = cx(0.0, 0.0);
        let terms: Vec<(Vec<f64>, &CMat)> = match &self.variant {
            Variant::Constant(_) => Vec::new(),
            Variant::Fourier(ts) => ts.iter().map(|t| (t.q.iter().map(|&q| q as f64).collect(), &t.coeff)).collect(),
            Variant::Grid(_) => unreachable!("grid potentials use quadrature"),
        };
        let mut out = Mat::<c64>::zeros(m, m);
        let mut accumulate = |p: &[f64], add: &dyn Fn(usize, usize) -> c64| {
            let g: Vec<f64> = (0..n).map(|j| PI * nu[j] as f64 + 2.0 * PI * t * p[j]).collect();
            let z0: Vec<c64> = g.iter().map(|&x| e0(x)).collect();
            let value = if derivative {
                let prod: c64 = z0.iter().product();
                let mut f = prod * (2.0 * t);
                for i in 0..n {
                    if p[i] != 0.0 {
                        let mut term = e1(g[i]) * cx(0.0, 2.0 * PI * p[i]) * (t * t);
                        for (j, z) in z0.iter().enumerate() {
                            if j != i {
                                term *= z;
                            }
                        }
                        f += term;
                    }
                }
                f
            } else {
                z0.iter().product::<c64>() * (t * t)
            };
            if value != zero {
                for i in 0..m {
                    for j in 0..m {
                        out[(i, j)] += add(i, j) * value;
                    }
                }
            }
        };
        match &self.variant {
            Variant::Constant(c) => accumulate(&vec![0.0; n], &|i, j| cx(c[(i, j)], 0.0)),
            _ => {
                for (p, coeff) in &terms {
                    accumulate(p, &|i, j| coeff[(i, j)]);
                }
            }
        }
        out
    }

    fn quadrature_transform(&self, t: f64, nu: &[i64], derivative: bool, grid: &CellGrid) -> Result<CMat> {
        let m = self.m;
        let vol = self.lattice.cell_volume();
        let mut out = Mat::<c64>::zeros(m, m);
        for ((x, s), w) in grid.nodes.iter().zip(&grid.lattice_nodes).zip(&grid.weights) {
            let f = if derivative { self.radial_derivative_at(t, x)? } else { self.eval_scaled(t, x)? };
            let ph: f64 = PI * nu.iter().zip(s).map(|(&v, s)| v as f64 * s).sum::<f64>();
            let e = cx(ph.cos(), ph.sin()) * (w / vol);
            for i in 0..m {
                for j in 0..m {
                    out[(i, j)] += e * f[(i, j)];
                }
            }
        }
        Ok(out)
    }

    /// Transform table of `V_t` (or `D_t` when `derivative`) over
    /// `|ν_j| ≤ nu_max[j]`.
    pub(crate) fn transform_table(&self, t: f64, nu_max: &[i64], derivative: bool) -> Result<TransformTable> {
        let m = self.m;
        let points = box_points(nu_max);
        let mut data = Vec::with_capacity(points.len() * m * m);
        if derivative && !self.has_gradient() {
            return Err(Error::NoGradient);
        }
        match self.sample_resolution() {
            None => {
                for nu in &points {
                    let g = self.analytic_transform(t, nu, derivative);
                    for i in 0..m {
                        for j in 0..m {
                            data.push(g[(i, j)]);
                        }
                    }
                }
            }
            Some(r) => {
                let grid = CellGrid::new(&self.lattice, r);
                let vol = self.lattice.cell_volume();
                let mut samples = Vec::with_capacity(grid.len());
                for x in &grid.nodes {
                    samples.push(if derivative { self.radial_derivative_at(t, x)? } else { self.eval_scaled(t, x)? });
                }
                for nu in &points {
                    let mut acc = vec![cx(0.0, 0.0); m * m];
                    for ((f, s), w) in samples.iter().zip(&grid.lattice_nodes).zip(&grid.weights) {
                        let ph: f64 = PI * nu.iter().zip(s).map(|(&v, s)| v as f64 * s).sum::<f64>();
                        let e = cx(ph.cos(), ph.sin()) * (w / vol);
                        for i in 0..m {
                            for j in 0..m {
                                acc[i * m + j] += e * f[(i, j)];
                            }
                        }
                    }
                    data.extend(acc);
                }
            }
        }
        Ok(TransformTable { nu_max: nu_max.to_vec(), m, data })
    }
}
