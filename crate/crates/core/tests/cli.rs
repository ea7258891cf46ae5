mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nonlocal_spectrum::config::{load_config, Problem};
use nonlocal_spectrum::io::{write_kernel_csv, write_potential_csv};
use serde_json::Value;

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonlocal-spectrum"))
        .args(args)
        .arg("--out")
        .arg(out)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().find(|l| l.starts_with('{')).expect("json on stderr");
    serde_json::from_str(line).unwrap()
}

#[test]
fn analyze_step_fixture_matches_scalar_root() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analyze", "--config", "fixtures/F2.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&dir.path().join("report.json"));
    let (root, _) = common::step_fixture_roots();
    let lambda = r["lambda"].as_f64().unwrap();
    assert!((lambda - root).abs() <= 1e-8, "{lambda} vs {root}");
    assert!(r["metadata"].is_object());
}

#[test]
fn bound_on_step_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["bound", "--config", "fixtures/F2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let b = read_json(&dir.path().join("bound.json"))["gap_bound"].clone();
    // V = -1 on half the torus: c1 = 1/2, |V|_2 = 1/sqrt 2, constant kernel so c2 = 1
    let gamma0 = 2.0 / 9.0 * 0.5 * 2f64.sqrt();
    let kappa = (gamma0 * gamma0).min(0.25);
    let got = b["kappa"].as_f64().unwrap();
    assert!((got - kappa).abs() <= 1e-12, "{got} vs {kappa}");
    assert_eq!(b["verdict"], "pass");
}

#[test]
fn zero_potential_reports_violation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zero.json");
    fs::write(
        &cfg,
        r#"{"grid_n": 32, "kernel": {"type": "constant"}, "potential": {"type": "constant", "value": 0.0}}"#,
    )
    .unwrap();
    let o = run(&["analyze", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let r = read_json(&dir.path().join("report.json"));
    assert_eq!(r["diagnostics"]["conforming"], false);
    assert_eq!(stderr_json(&o)["exit_code"], 2);
}

#[test]
fn odd_grid_override_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analyze", "--config", "fixtures/F1", "--grid-n", "33"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["exit_code"], 1);
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn unknown_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.json");
    fs::write(
        &cfg,
        r#"{"grdi_n": 32, "kernel": {"type": "constant"}, "potential": {"type": "constant", "value": -1.0}}"#,
    )
    .unwrap();
    let o = run(&["analyze", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let e = stderr_json(&o);
    assert!(e["message"].as_str().unwrap().contains("grdi_n"), "{e}");
}

#[test]
fn evolve_writes_trace_and_extinction() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["evolve", "--config", "fixtures/F1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,l2,sup,mass"));
    assert!(csv.lines().count() > 10);
    let ext = read_json(&dir.path().join("extinction.json"));
    assert_eq!(ext["extinct"], true);
}

#[test]
fn check_kernel_reports_stats() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["check-kernel", "--config", "fixtures/F3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let k = read_json(&dir.path().join("kernel_check.json"));
    assert!(k.is_object() && !k.as_object().unwrap().is_empty());
}

#[test]
fn tabulated_inputs_reproduce_analytic_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = load_config(Path::new("fixtures/F3")).unwrap().with_overrides(None, Some(32)).unwrap();
    let problem = Problem::build(&config).unwrap();
    write_kernel_csv(&problem.kernel, fs::File::create(dir.path().join("k.csv")).unwrap()).unwrap();
    write_potential_csv(&problem.potential, fs::File::create(dir.path().join("v.csv")).unwrap()).unwrap();
    let cfg = dir.path().join("tab.json");
    fs::write(
        &cfg,
        r#"{"grid_n": 32, "kernel": {"type": "csv", "path": "k.csv"}, "potential": {"type": "csv", "path": "v.csv"}}"#,
    )
    .unwrap();

    let a = dir.path().join("analytic");
    let t = dir.path().join("tabulated");
    let oa = run(&["analyze", "--config", "fixtures/F3", "--grid-n", "32"], &a);
    let ot = run(&["analyze", "--config", cfg.to_str().unwrap()], &t);
    assert_eq!(oa.status.code(), Some(0));
    assert_eq!(ot.status.code(), Some(0), "{}", String::from_utf8_lossy(&ot.stderr));
    let la = read_json(&a.join("report.json"))["lambda"].as_f64().unwrap();
    let lt = read_json(&t.join("report.json"))["lambda"].as_f64().unwrap();
    assert!((la - lt).abs() <= 1e-12, "{la} vs {lt}");
}
