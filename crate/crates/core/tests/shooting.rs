use std::f64::consts::PI;

use faer::Mat;
use morse_maslov::linalg::{cx, CMat};
use morse_maslov::potential::FourierTerm;
use morse_maslov::shooting::*;
use morse_maslov::spectral::{assemble, eigenvalues};
use morse_maslov::symplectic::{self, random};
use morse_maslov::verifier::{scan_conjugate_points, ScanSettings};
use morse_maslov::*;
use rand::RngExt;

fn unit() -> Lattice {
    Lattice::unit(1)
}

fn morse_c(v: &PotentialSpec, bc: BoundaryCondition, t: f64) -> usize {
    let b = BasisSpec::new(&unit(), bc, 48, v.m(), Field::Complex).unwrap();
    eigenvalues(&assemble(&b, v, t, 0.0).unwrap()).unwrap().morse_index().unwrap()
}

#[test]
fn free_solutions_are_one_and_x() {
    let v = PotentialSpec::scalar(&unit(), 0.0);
    let s = fundamental_solutions(&v, 1.0, 0.0, 64).unwrap();
    let want = [[1.0, 1.0], [0.0, 1.0]];
    for (i, row) in want.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            assert!((s.fundamental[(i, j)] - w).abs() < 1e-14);
        }
    }
}

#[test]
fn harmonic_solution_and_wronskian() {
    let v = PotentialSpec::scalar(&unit(), -25.0);
    let steps = default_steps(&v, 0.0).unwrap();
    let s = fundamental_solutions(&v, 1.0, 0.0, steps).unwrap();
    let f = &s.fundamental;
    assert!((f[(0, 0)] - 5f64.cos()).abs() < 1e-9);
    assert!((f[(1, 0)] + 5.0 * 5f64.sin()).abs() < 1e-8);
    assert!((f[(0, 1)] - 5f64.sin() / 5.0).abs() < 1e-9);
    let w = f[(0, 0)] * f[(1, 1)] - f[(0, 1)] * f[(1, 0)];
    assert!((w - 1.0).abs() < 1e-10);
    assert!(s.error_estimate < 1e-8);
}

#[test]
fn coarse_steps_are_refused() {
    let v = PotentialSpec::scalar(&unit(), -25.0);
    assert!(matches!(fundamental_solutions(&v, 1.0, 0.0, 16), Err(Error::StepTooCoarse { .. })));
}

#[test]
fn trace_frames_are_lagrangian() {
    let v = PotentialSpec::scalar_cosine(&unit(), 2, -30.0, 8.0, vec![1]).unwrap();
    let ts = TraceSpace::new(2);
    let tp = TracePath::new(&v, 0.0, (0.1, 1.0)).unwrap();
    for t in [0.1, 0.5, 1.0] {
        symplectic::LagrangianFrame::new(ts.space(), &tp.frame(t).unwrap()).unwrap();
    }
    for bc in [BoundaryCondition::periodic(1), BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
        ts.reference_plane(&bc).unwrap();
    }
}

#[test]
fn quasi_periodic_routes_agree_with_negative_forms() {
    let v = PotentialSpec::scalar(&unit(), -100.0);
    let bc = BoundaryCondition::Theta(vec![0.25]);
    let sf = maslov_1d(&v, &bc, 0.05, Route::SpectralFlow).unwrap();
    let cf = maslov_1d(&v, &bc, 0.05, Route::CrossingForms).unwrap();
    assert_eq!(sf.maslov, -6);
    assert_eq!(cf.maslov, -6);
    let want = [0.05 * PI, 0.15 * PI, 0.25 * PI];
    assert_eq!(cf.crossings.len(), 3);
    for (c, w) in cf.crossings.iter().zip(want) {
        assert!((c.t - w).abs() < 1e-6, "{} vs {w}", c.t);
        assert_eq!(c.dim_real, 2);
        assert_eq!(c.n_minus, 2);
        for (a, b) in c.form.iter().zip(&c.closed_form) {
            assert!(*a < 0.0);
            assert!((a - b).abs() <= 1e-5 * b.abs(), "{a} vs {b}");
        }
    }
}

#[test]
fn dirichlet_single_conjugate_point() {
    let v = PotentialSpec::scalar(&unit(), -25.0);
    let cf = maslov_1d(&v, &BoundaryCondition::Dirichlet, 0.05, Route::CrossingForms).unwrap();
    assert_eq!(cf.maslov, -2);
    assert_eq!(cf.crossings.len(), 1);
    assert!((cf.crossings[0].t - PI / 5.0).abs() < 1e-6);
    let k = kernel_1d(&v, &BoundaryCondition::Dirichlet, PI / 5.0, 4096, 1e-7).unwrap();
    assert_eq!(k.dim_complex, 1);
    let (vol, bnd) = (k.volume_form[(0, 0)], k.boundary_form[(0, 0)]);
    assert!(vol.re < 0.0 && vol.im.abs() < 1e-10);
    assert!((vol - bnd).norm() <= 1e-5 * bnd.norm());
    assert_eq!(real_kernel_dim(&v, &BoundaryCondition::Dirichlet, PI / 5.0, 4096).unwrap(), 2);
}

#[test]
fn periodic_double_crossing() {
    let v = PotentialSpec::scalar(&unit(), -100.0);
    let bc = BoundaryCondition::periodic(1);
    let cf = maslov_1d(&v, &bc, 0.05, Route::CrossingForms).unwrap();
    let interior: Vec<_> = cf.crossings.iter().filter(|c| c.endpoint.is_none()).collect();
    assert_eq!(interior.len(), 1);
    assert!((interior[0].t - 0.2 * PI).abs() < 1e-6);
    assert_eq!(interior[0].dim_real, 4);
    let t = refine_crossing(&v, &bc, 0.6, 0.65).unwrap();
    assert_eq!(t.len(), 1);
    assert!((t[0] - 0.2 * PI).abs() < 1e-9);
}

#[test]
fn shooting_and_galerkin_locate_the_same_crossings() {
    let lat = unit();
    let v = PotentialSpec::scalar_cosine(&lat, 1, -50.0, -20.0, vec![1]).unwrap();
    let bc = BoundaryCondition::Theta(vec![0.25]);
    let cf = maslov_1d(&v, &bc, 0.05, Route::CrossingForms).unwrap();
    let basis = BasisSpec::new(&lat, bc, 64, 1, Field::Complex).unwrap();
    let mut settings = ScanSettings::new(0.05, 200);
    settings.shooting = false;
    let scan = scan_conjugate_points(&basis, &v, &settings, &Execution::with_workers(1)).unwrap();
    assert!(!cf.crossings.is_empty());
    assert_eq!(scan.crossings.len(), cf.crossings.len());
    for (g, s) in scan.crossings.iter().zip(&cf.crossings) {
        assert!((g.t_star - s.t).abs() < 1e-6, "{} vs {}", g.t_star, s.t);
        assert_eq!(g.dim_r, s.dim_real);
        for (a, b) in s.form.iter().zip(&s.closed_form) {
            assert!((a - b).abs() <= 1e-5 * b.abs());
        }
    }
}

fn sym(rng: &mut impl rand::Rng, m: usize, scale: f64) -> CMat {
    let a = Mat::from_fn(m, m, |_, _| rng.random_range(-scale..scale));
    Mat::from_fn(m, m, |i, j| cx(0.5 * (a[(i, j)] + a[(j, i)]), 0.0))
}

fn random_trig(seed: u64) -> PotentialSpec {
    let mut rng = random::rng(seed);
    let m = 1 + (seed as usize % 2);
    let mut c0 = sym(&mut rng, m, 5.0);
    for i in 0..m {
        c0[(i, i)] += cx(rng.random_range(-90.0..-20.0), 0.0);
    }
    let mut terms = vec![FourierTerm { q: vec![0], coeff: c0 }];
    for q in 1..=2i64 {
        let c = sym(&mut rng, m, 6.0);
        terms.push(FourierTerm { q: vec![q], coeff: c.clone() });
        terms.push(FourierTerm { q: vec![-q], coeff: c });
    }
    PotentialSpec::fourier(&unit(), m, terms).unwrap()
}

#[test]
fn random_trigonometric_potentials_satisfy_the_quasi_periodic_identity() {
    let bc = BoundaryCondition::Theta(vec![0.25]);
    for seed in 0..5u64 {
        let v = random_trig(seed);
        assert_eq!(morse_c(&v, bc.clone(), 0.05), 0, "seed {seed}");
        let mor = morse_c(&v, bc.clone(), 1.0) as i64;
        let sf = maslov_1d(&v, &bc, 0.05, Route::SpectralFlow).unwrap().maslov;
        let cf = maslov_1d(&v, &bc, 0.05, Route::CrossingForms).unwrap().maslov;
        assert_eq!(sf, cf, "seed {seed}");
        assert_eq!(2 * mor, -sf, "seed {seed}");
    }
}

#[test]
fn tau_outside_the_unit_interval_is_a_config_error() {
    let v = PotentialSpec::scalar(&unit(), -1.0);
    for tau in [0.0, 1.0, -0.2] {
        assert!(matches!(
            maslov_1d(&v, &BoundaryCondition::Dirichlet, tau, Route::SpectralFlow),
            Err(Error::Config { .. })
        ));
    }
}
