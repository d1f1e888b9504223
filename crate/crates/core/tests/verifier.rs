use std::f64::consts::PI;

use morse_maslov::verifier::*;
use morse_maslov::*;

fn constant_1d(v: f64, bc: &str) -> String {
    format!(
        r#"
[lattice]
basis = [[1.0]]

[potential]
kind = "constant"
m = 1
value = [[{v}]]

[bc]
{bc}

[solver]
truncation = 32
t_points = 80
"#
    )
}

fn qp025(v: f64) -> ExperimentConfig {
    ExperimentConfig::from_str_with(&constant_1d(v, "kind = \"theta\"\ntheta = [0.25]"), &[]).unwrap()
}

fn config_error(text: &str, overrides: &[&str]) -> String {
    let ov: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    match ExperimentConfig::from_str_with(text, &ov) {
        Err(Error::Config { field, .. }) => field,
        Err(e) => panic!("expected a config error, got {e}"),
        Ok(_) => panic!("expected a config error"),
    }
}

#[test]
fn config_errors_name_the_field() {
    let base = constant_1d(-100.0, "kind = \"theta\"\ntheta = [0.25]");
    assert_eq!(config_error(&base, &["solver.tau=1.5"]), "solver.tau");
    assert_eq!(config_error(&base, &["solver.truncation=\"many\""]), "solver.truncation");
    assert_eq!(config_error(&base, &["bc.theta=[1.2]"]), "bc.theta");
    assert_eq!(config_error(&base, &["bc.kind=\"robin\""]), "bc.kind");
    assert_eq!(config_error(&base, &["potential.value=[[1.0, 2.0]]"]), "potential.value");
    assert_eq!(config_error(&base, &["solver.speed=3"]), "solver.speed");
    assert_eq!(config_error(&base, &["tolerances.eps_form=0.0"]), "tolerances.eps_form");
    assert_eq!(config_error(&base.replace("[lattice]", "[lattices]"), &[]), "lattices");
    assert_eq!(config_error(&base.replace("m = 1\n", ""), &[]), "potential.m");
    assert_eq!(config_error(&base, &["solver.identity=\"fermat\""]), "solver.identity");
}

#[test]
fn overrides_replace_keys() {
    let base = constant_1d(-100.0, "kind = \"theta\"\ntheta = [0.25]");
    let ov = ["solver.tau=0.1".to_string(), "output.prefix=trial".to_string(), "solver.field=\"realified\"".into()];
    let cfg = ExperimentConfig::from_str_with(&base, &ov).unwrap();
    assert_eq!(cfg.tau, 0.1);
    assert_eq!(cfg.prefix, "trial");
    assert_eq!(cfg.field, Field::Realified);
    assert_eq!(cfg.default_identity(), Identity::QuasiPeriodic);
}

#[test]
fn defaults_follow_the_dimension() {
    let cfg = qp025(-1.0);
    assert_eq!(cfg.tau, 0.05);
    assert!(cfg.auto_tau);
    let two = ExperimentConfig::from_str_with(
        "[lattice]\nbasis = [[1.0, 0.0], [0.0, 1.0]]\n[potential]\nkind = \"constant\"\nm = 1\nvalue = [[0.0]]\n[bc]\nkind = \"dirichlet\"\n",
        &[],
    )
    .unwrap();
    assert_eq!(two.truncation, 16);
    assert_eq!(two.t_points, 60);
    assert_eq!(two.default_identity(), Identity::Dirichlet);
}

#[test]
fn identities_apply_to_their_boundary_conditions() {
    let qp = BoundaryCondition::Theta(vec![0.25]);
    let per = BoundaryCondition::periodic(1);
    assert!(Identity::QuasiPeriodic.applies_to(&qp));
    assert!(!Identity::QuasiPeriodic.applies_to(&per));
    assert!(Identity::PeriodicIv.applies_to(&per));
    assert!(!Identity::Neumann.applies_to(&BoundaryCondition::Dirichlet));
    let cfg = qp025(-100.0);
    assert!(matches!(
        verify_identity(&cfg, Identity::Dirichlet, &Execution::with_workers(1)),
        Err(Error::Config { .. })
    ));
}

#[test]
fn quasi_periodic_report() {
    let cfg = qp025(-100.0);
    let r = verify_identity(&cfg, Identity::QuasiPeriodic, &Execution::with_workers(1)).unwrap();
    assert!(r.pass);
    assert_eq!(r.schema_version, SCHEMA_VERSION);
    assert_eq!(r.morse_c, 3);
    assert_eq!(r.maslov, -6);
    assert_eq!(r.identities[0].lhs, 6);
    assert_eq!(r.identities[0].rhs, 6);
    assert_eq!(r.walk.total, 0);
    let t: Vec<f64> = r.scan.crossings.iter().map(|c| c.t_star).collect();
    for (got, want) in t.iter().zip([0.05 * PI, 0.15 * PI, 0.25 * PI]) {
        assert!((got - want).abs() < 1e-6);
    }
    let json = report::to_json(&r).unwrap();
    assert!(json.contains("\"schema_version\": 1"));
    assert!(json.ends_with("}\n"));
}

#[test]
fn positive_potential_has_no_crossings_and_a_header_only_table() {
    let cfg = qp025(100.0);
    let r = verify_identity(&cfg, Identity::QuasiPeriodicIii, &Execution::with_workers(1)).unwrap();
    assert!(r.pass);
    assert_eq!(r.morse_c, 0);
    assert!(r.scan.crossings.is_empty());
    assert_eq!(report::crossings_csv(&r.scan), format!("{}\n", report::CROSSING_HEADER));
}

#[test]
fn crossing_table_uses_seventeen_significant_digits() {
    let cfg = ExperimentConfig::from_str_with(&constant_1d(-25.0, "kind = \"dirichlet\""), &[]).unwrap();
    let r = verify_identity(&cfg, Identity::DirichletSum, &Execution::with_workers(1)).unwrap();
    assert!(r.pass);
    let csv = report::crossings_csv(&r.scan);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t_star,dim_C,dim_R,signature,form_volume,form_boundary,slope");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 7);
    let mantissa = row[0].split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
    assert!((row[0].parse::<f64>().unwrap() - PI / 5.0).abs() < 1e-6);
    assert_eq!(row[1], "1");
    assert_eq!(row[2], "2");
    assert!(lines.next().is_none());
}

#[test]
fn outputs_do_not_depend_on_the_worker_count() {
    let cfg = ExperimentConfig::from_str_with(
        r#"
[lattice]
basis = [[1.0]]
[potential]
kind = "fourier"
m = 1
value = [[-50.0]]
coefficients = [ { q = [1], re = [[-5.0]] }, { q = [-1], re = [[-5.0]] } ]
[bc]
kind = "theta"
theta = [0.25]
[solver]
truncation = 32
t_points = 60
"#,
        &[],
    )
    .unwrap();
    let outputs: Vec<(String, String, Vec<String>)> = [1, 3]
        .into_iter()
        .map(|w| {
            let r = verify_all(&cfg, &Execution::with_workers(w)).unwrap();
            let curves = (0..4).map(|j| report::curve_csv(&r.scan.flow, j)).collect();
            (report::crossings_csv(&r.scan), report::to_json(&r).unwrap(), curves)
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn written_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = qp025(-100.0);
    let r = verify_identity(&cfg, Identity::QuasiPeriodic, &Execution::with_workers(1)).unwrap();
    let paths = report::write_scan(dir.path(), "qp", &r.scan).unwrap();
    assert!(paths.iter().any(|p| p.ends_with("qp_crossings.csv")));
    let curve = std::fs::read_to_string(dir.path().join("qp_curves").join("curve_000.csv")).unwrap();
    assert!(curve.starts_with("t,lambda\n"));
    let json = report::write_json(dir.path(), "qp", "verify", &r).unwrap();
    let back: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(back["pass"], serde_json::Value::Bool(true));
}

#[test]
fn walk_ledger_closes() {
    let cfg = ExperimentConfig::from_str_with(&constant_1d(-25.0, "kind = \"dirichlet\""), &[]).unwrap();
    let scan = scan_conjugate_points(
        &cfg.basis().unwrap(),
        &cfg.potential,
        &ScanSettings::new(0.05, 80),
        &Execution::with_workers(1),
    )
    .unwrap();
    let w = rectangle_walk_checked(&scan, &cfg.potential).unwrap();
    assert_eq!(w.sigma1, 0);
    assert_eq!(w.sigma2, -2);
    assert_eq!(w.sigma3, 2);
    assert_eq!(w.sigma4, 0);
    assert!(w.sigma4_clear);
    assert!(w.min_eigenvalue > w.lambda_inf);
}

#[test]
fn auto_tau_keeps_a_small_enough_start() {
    let cfg = qp025(-100.0);
    let tau = choose_tau(&cfg.basis().unwrap(), &cfg.potential, 0.5, None).unwrap();
    assert!((1e-4..=0.5).contains(&tau));
    let b = cfg.basis().unwrap();
    let op = spectral::assemble(&b, &cfg.potential, tau, 0.0).unwrap();
    assert_eq!(spectral::eigenvalues(&op).unwrap().morse_index().unwrap(), 0);
}
