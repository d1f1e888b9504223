use std::f64::consts::PI;

use faer::Mat;
use morse_maslov::linalg::{self, cx, RMat};
use morse_maslov::symplectic::random::{self, RandomPath};
use morse_maslov::symplectic::*;
use morse_maslov::Error;
use proptest::prelude::*;
use rand::RngExt;

fn col(v: &[f64]) -> RMat {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

#[test]
fn canonical_complexification() {
    let sp = SymplecticSpace::standard(1);
    let x = LagrangianFrame::new(&sp, &col(&[1.0, 0.0])).unwrap();
    let c = complexify(&sp, &x).unwrap();
    let z = c.to_complex(&[0.3, -0.7]);
    assert!((z[0] - cx(0.3, -0.7)).norm() < 1e-15);
    let u = c.from_complex(&z);
    assert!((u[0] - 0.3).abs() < 1e-15 && (u[1] + 0.7).abs() < 1e-15);
}

#[test]
fn rotated_frame_preserves_the_hermitian_product() {
    let sp = SymplecticSpace::standard(1);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = LagrangianFrame::new(&sp, &col(&[s, s])).unwrap();
    let c = complexify(&sp, &x).unwrap();
    let (u, v) = ([0.2, 1.1], [-0.4, 0.5]);
    let want = cx(u[0] * v[0] + u[1] * v[1], -sp.omega(&u, &v));
    assert!((c.inner(&u, &v) - want).norm() < 1e-14);
}

#[test]
fn non_lagrangian_frames_are_rejected() {
    let sp = SymplecticSpace::standard(2);
    let bad = Mat::from_fn(4, 2, |i, j| if (i, j) == (0, 0) || (i, j) == (2, 1) { 1.0 } else { 0.0 });
    assert!(matches!(LagrangianFrame::new(&sp, &bad), Err(Error::NotLagrangian { .. })));
}

#[test]
fn souriau_of_a_plane_with_itself_and_its_rotation() {
    let mut rng = random::rng(7);
    let sp = SymplecticSpace::standard(3);
    let x = LagrangianFrame::new(&sp, &random::lagrangian(3, &mut rng)).unwrap();
    let s = souriau(&sp, &x, &x).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { -1.0 } else { 0.0 };
            assert!((s[(i, j)] - cx(want, 0.0)).norm() < 1e-12);
        }
    }
    assert_eq!(minus_one_multiplicity(&s, 1e-8).unwrap(), 3);

    let jx = LagrangianFrame::new(&sp, &(sp.j() * x.matrix())).unwrap();
    let s = souriau(&sp, &x, &jx).unwrap();
    for i in 0..3 {
        assert!((s[(i, i)] - cx(1.0, 0.0)).norm() < 1e-12);
    }
    assert_eq!(intersection_dim(&x, &jx).unwrap(), 0);
}

#[test]
fn rotation_by_alpha_gives_phase_pi_plus_two_alpha() {
    let sp = SymplecticSpace::standard(1);
    let x = LagrangianFrame::new(&sp, &col(&[1.0, 0.0])).unwrap();
    for alpha in [0.3, 1.0, -0.7] {
        let y = LagrangianFrame::new(&sp, &col(&[f64::cos(alpha), f64::sin(alpha)])).unwrap();
        let s = souriau(&sp, &x, &y).unwrap();
        let want = cx((PI + 2.0 * alpha).cos(), (PI + 2.0 * alpha).sin());
        assert!((s[(0, 0)] - want).norm() < 1e-12, "alpha = {alpha}");
        assert_eq!(intersection_dim(&x, &y).unwrap(), 0);
    }
}

#[test]
fn constant_path_has_index_zero() {
    let mut rng = random::rng(3);
    let sp = SymplecticSpace::standard(2);
    let x = LagrangianFrame::new(&sp, &random::lagrangian(2, &mut rng)).unwrap();
    let y = random::lagrangian(2, &mut rng);
    let path = move |_t: f64| Ok(y.clone());
    assert_eq!(maslov_spectral_flow(&sp, &x, &path, 0.0, 1.0, 8).unwrap(), 0);
}

#[test]
fn single_upward_sweep_through_minus_one() {
    // U(t) = e^{iφ(t)} with φ crossing π once upward.
    let u = |t: f64| {
        let phi = PI - 0.5 + t;
        Ok(Mat::from_fn(1, 1, |_, _| cx(phi.cos(), phi.sin())))
    };
    assert_eq!(spectral_flow(&u, 0.0, 1.0, 4).unwrap(), 1);
    let down = |t: f64| u(1.0 - t);
    assert_eq!(spectral_flow(&down, 0.0, 1.0, 4).unwrap(), -1);
}

#[test]
fn rotating_line_crossing_form() {
    // Υ(t) = span(cos(t − t*), sin(t − t*)) meets X = span(e₁) at t*.
    let sp = SymplecticSpace::standard(1);
    let x = LagrangianFrame::new(&sp, &col(&[1.0, 0.0])).unwrap();
    let t_star = 0.4;
    let path = move |t: f64| Ok(col(&[(t - t_star).cos(), (t - t_star).sin()]));
    let d = crossing_form(&sp, &path, t_star, &x, 1e-4, (0.0, 1.0)).unwrap();
    assert_eq!(d.dim(), 1);
    assert!((d.form[(0, 0)] - 1.0).abs() < 1e-8);
    assert_eq!(d.signature().unwrap(), 1);
    assert!(matches!(crossing_form(&sp, &path, 0.9, &x, 1e-4, (0.0, 1.0)), Err(Error::NotACrossing { .. })));

    let mc = maslov_crossing_forms(&sp, &x, &path, 0.0, 1.0, 16).unwrap();
    assert_eq!(mc.total, 1);
    assert!((mc.crossings[0].t - t_star).abs() < 1e-9);
}

#[test]
fn eigenvalue_segment_form_is_negative() {
    // Graphs {(u, (H - s)u)} for H = diag(1, 3) near s = 1, against {(q, 0)}.
    let sp = SymplecticSpace::standard(2);
    let x = LagrangianFrame::new(&sp, &Mat::from_fn(4, 2, |i, j| if i == j { 1.0 } else { 0.0 })).unwrap();
    let h = [1.0, 3.0];
    let path = move |s: f64| {
        let f = Mat::from_fn(4, 2, |i, j| match (i, j) {
            (0, 0) | (1, 1) => 1.0,
            (2, 0) => h[0] - s,
            (3, 1) => h[1] - s,
            _ => 0.0,
        });
        Ok(linalg::orthonormalize(f.as_ref()))
    };
    let d = crossing_form(&sp, &path, 1.0, &x, 1e-4, (0.0, 2.0)).unwrap();
    assert_eq!(d.dim(), 1);
    assert!(d.form[(0, 0)] < 0.0);
    assert_eq!(d.signature().unwrap(), -1);
}

#[test]
fn left_endpoint_negative_crossing_counts_minus_n_minus() {
    let sp = SymplecticSpace::standard(1);
    let x = LagrangianFrame::new(&sp, &col(&[1.0, 0.0])).unwrap();
    let path = |t: f64| Ok(col(&[t.cos(), -t.sin()]));
    let mc = maslov_crossing_forms(&sp, &x, &path, 0.0, 1.0, 8).unwrap();
    assert!(mc.start.is_some());
    assert_eq!(mc.start.as_ref().unwrap().n_minus, 1);
    assert_eq!(mc.total, -1);
    let sf = maslov_spectral_flow(&sp, &x, &path, 0.0, 1.0, 8).unwrap();
    assert_eq!(sf, -1);
}

fn random_setup(seed: u64, n: usize) -> (SymplecticSpace, LagrangianFrame, RandomPath) {
    let mut rng = random::rng(seed);
    let sp = SymplecticSpace::standard(n);
    let x = LagrangianFrame::new(&sp, &random::lagrangian(n, &mut rng)).unwrap();
    let p = RandomPath::new(n, 2, 2.0, &mut rng);
    (sp, x, p)
}

#[test]
fn catenation_and_homotopy_on_seeded_paths() {
    for seed in 0..50u64 {
        let n = 1 + (seed as usize % 4);
        let (sp, x, p) = random_setup(seed, n);
        let path = |t: f64| Ok(p.frame(t));
        let whole = maslov_spectral_flow(&sp, &x, &path, 0.0, 1.0, 16).unwrap();
        let mid = random::rng(seed + 1000).random_range(0.2..0.8);
        let a = maslov_spectral_flow(&sp, &x, &path, 0.0, mid, 16).unwrap();
        let b = maslov_spectral_flow(&sp, &x, &path, mid, 1.0, 16).unwrap();
        assert_eq!(whole, a + b, "seed {seed}");

        let q = p.perturbed(0.5, &mut random::rng(seed + 2000));
        let qpath = |t: f64| Ok(q.frame(t));
        let bent = maslov_spectral_flow(&sp, &x, &qpath, 0.0, 1.0, 16).unwrap();
        assert_eq!(whole, bent, "seed {seed}");

        let forms = maslov_crossing_forms(&sp, &x, &path, 0.0, 1.0, 16).unwrap();
        assert_eq!(whole, forms.total, "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn intersection_dimension_matches_minus_one_kernel(seed in 0u64..1_000_000, n in 1usize..=8, d_frac in 0.0f64..1.0) {
        let mut rng = random::rng(seed);
        let sp = SymplecticSpace::standard(n);
        let u = random::unitary(n, &mut rng);
        let x = LagrangianFrame::new(&sp, &random::frame_of_unitary(&u)).unwrap();
        let d = ((n + 1) as f64 * d_frac) as usize;
        let y = LagrangianFrame::new(&sp, &random::with_intersection(&u, d.min(n), &mut rng)).unwrap();
        let s = souriau(&sp, &x, &y).unwrap();
        prop_assert!(unitarity_defect(&s) < 1e-10);
        prop_assert_eq!(intersection_dim(&x, &y).unwrap(), d.min(n));
        prop_assert_eq!(minus_one_multiplicity(&s, 1e-8).unwrap(), d.min(n));
    }

    #[test]
    fn omega_is_j_invariant(seed in 0u64..1_000_000, n in 1usize..=5) {
        let mut rng = random::rng(seed);
        let sp = SymplecticSpace::standard(n);
        let u: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ju = (0..2 * n).map(|r| (0..2 * n).map(|c| sp.j()[(r, c)] * u[c]).sum()).collect::<Vec<f64>>();
        let jv = (0..2 * n).map(|r| (0..2 * n).map(|c| sp.j()[(r, c)] * v[c]).sum()).collect::<Vec<f64>>();
        prop_assert!((sp.omega(&ju, &jv) - sp.omega(&u, &v)).abs() < 1e-12);
        prop_assert!((sp.omega(&u, &v) + sp.omega(&v, &u)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn routes_agree_on_random_paths(seed in 0u64..1_000_000, n in 1usize..=4) {
        let (sp, x, p) = random_setup(seed, n);
        let path = |t: f64| Ok(p.frame(t));
        let sf = maslov_spectral_flow(&sp, &x, &path, 0.0, 1.0, 16).unwrap();
        let cf = maslov_crossing_forms(&sp, &x, &path, 0.0, 1.0, 16).unwrap().total;
        prop_assert_eq!(sf, cf);
    }
}
