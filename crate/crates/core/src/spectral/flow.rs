use super::assemble::{assemble, GalerkinOperator};
use super::basis::BasisSpec;
use super::eigen::{eigendecompose, SpectralResult, Vectors};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::potential::PotentialSpec;

const OVERLAP_FLAG: f64 = 0.7;
const MASS_FLOOR: f64 = 0.5;

/// Eigenvalue curves tracked across a `t` grid.
#[derive(Debug, Clone)]
pub struct EigenFlow {
    pub t: Vec<f64>,
    /// `curves[j][i]` is curve `j` at `t[i]`; curves are labelled by their
    /// sorted position at `t[0]`.
    pub curves: Vec<Vec<f64>>,
    /// Worst matched overlap per step.
    pub quality: Vec<f64>,
    /// Steps with quality below the refinement threshold.
    pub flagged: Vec<usize>,
    /// Kernel tolerance at each grid point.
    pub eps_ker: Vec<f64>,
}

impl EigenFlow {
    pub fn n_curves(&self) -> usize {
        self.curves.len()
    }
}

/// Number of tracked curves: every eigenvalue that can reach zero on `(0, 1]`
/// has Laplace eigenvalue at most the potential norm bound.
pub fn tracked_count(basis: &BasisSpec, v: &PotentialSpec) -> Result<usize> {
    let bound = v.norm_bound()?;
    let below = basis.modes().iter().filter(|k| basis.laplace_eigenvalue(k) <= bound * (1.0 + 1e-9) + 1e-9).count();
    let mult = basis.block_multiplicity();
    Ok(basis.dim().min(2 * below * mult + 4 * mult))
}

fn clusters(values: &[f64]) -> Vec<usize> {
    let scale = values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut id = vec![0usize; values.len()];
    for i in 1..values.len() {
        id[i] = if values[i] - values[i - 1] <= 1e-8 * scale { id[i - 1] } else { id[i - 1] + 1 };
    }
    id
}

/// Greedy overlap matching; returns `perm[j]` = index at the next point of the
/// eigenvector continuing index `j`, and the worst cluster-level overlap.
fn match_step(prev: &Vectors, next: &Vectors, next_vals: &[f64], step: usize) -> Result<(Vec<usize>, f64)> {
    let o = prev.overlaps(next);
    let k = o.nrows();
    let cl = clusters(next_vals);
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(k * k);
    for j in 0..k {
        for l in 0..k {
            pairs.push((o[(j, l)], j, l));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut perm = vec![usize::MAX; k];
    let mut used = vec![false; k];
    for &(_, j, l) in &pairs {
        if perm[j] == usize::MAX && !used[l] {
            perm[j] = l;
            used[l] = true;
        }
    }
    let mut worst = 1.0f64;
    for j in 0..k {
        let mass: f64 = (0..k).map(|l| o[(j, l)]).sum();
        let cluster: f64 = (0..k).filter(|&l| cl[l] == cl[perm[j]]).map(|l| o[(j, l)]).sum();
        if mass < MASS_FLOOR && j < k / 2 {
            return Err(Error::MatchFailure { step });
        }
        if j < k / 2 {
            worst = worst.min(cluster);
        }
    }
    Ok((perm, worst))
}

fn solve(basis: &BasisSpec, v: &PotentialSpec, t: f64, keep: usize) -> Result<SpectralResult> {
    let op: GalerkinOperator = assemble(basis, v, t, 0.0)?;
    let mut r = eigendecompose(&op)?;
    r.values.truncate(keep);
    r.vectors = r.vectors.map(|x| x.truncate(keep));
    Ok(r)
}

/// Eigen-decomposes at every grid point (in parallel when allowed) and links
/// the eigenvalues into curves by a sequential overlap matching in grid order.
pub fn eigen_flow(basis: &BasisSpec, v: &PotentialSpec, t_grid: &[f64], exec: &Execution) -> Result<EigenFlow> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] <= w[0]) || t_grid[0] <= 0.0 {
        return Err(Error::DimensionMismatch("t grid must be ascending within (0, 1]".into()));
    }
    let keep = tracked_count(basis, v)?;
    let results: Vec<Result<SpectralResult>> = exec.map(t_grid, |&t| solve(basis, v, t, keep));
    let results: Vec<SpectralResult> = results.into_iter().collect::<Result<_>>()?;
    let mut curves = vec![Vec::with_capacity(t_grid.len()); keep];
    let mut position: Vec<usize> = (0..keep).collect();
    for (j, c) in curves.iter_mut().enumerate() {
        c.push(results[0].values[j]);
    }
    let mut quality = Vec::new();
    let mut flagged = Vec::new();
    for i in 1..results.len() {
        let prev = results[i - 1].vectors.as_ref().expect("vectors");
        let next = results[i].vectors.as_ref().expect("vectors");
        let (perm, worst) = match_step(prev, next, &results[i].values, i - 1)?;
        for (j, c) in curves.iter_mut().enumerate() {
            position[j] = perm[position[j]];
            c.push(results[i].values[position[j]]);
        }
        if worst < OVERLAP_FLAG {
            flagged.push(i - 1);
        }
        quality.push(worst);
    }
    Ok(EigenFlow { t: t_grid.to_vec(), curves, quality, flagged, eps_ker: results.iter().map(|r| r.eps_ker).collect() })
}
