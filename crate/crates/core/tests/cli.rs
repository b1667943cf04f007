//! The `sirs` binary: exit codes, output layout and reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sirs::scenario::presets;
use sirs::Scenario;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn sirs(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sirs"))
        .env(sirs::cli::OUT_ENV, out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_scenario(dir: &Path, name: &str, s: &Scenario) -> String {
    let path = dir.join(format!("{name}.toml"));
    fs::write(&path, s.to_toml_string()).unwrap();
    path.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn eigen_prints_lambda1_and_writes_eigenfunction() {
    let out = tempfile::tempdir().unwrap();
    let hom1 = scenarios().join("hom1.toml");
    let o = sirs(out.path(), &["eigen", hom1.to_str().unwrap(), "--rho", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lambda1: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("lambda1 "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((lambda1 + 1.0).abs() < 1e-8);
    assert!(out.path().join("hom1/eigen/eigenfunction.txt").exists());
}

#[test]
fn missing_or_malformed_input_exits_2() {
    let out = tempfile::tempdir().unwrap();
    let o = sirs(out.path(), &["speed", "/nonexistent/scenario.toml"]);
    assert_eq!(o.status.code(), Some(2));
    let bad = out.path().join("bad.toml");
    fs::write(&bad, "dimension = 1\nd = -1.0\n").unwrap();
    let o = sirs(out.path(), &["stationary", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn solver_failure_exits_3() {
    let out = tempfile::tempdir().unwrap();
    let mut s = presets::hom1();
    s.grid.domain_half_width = 10.0;
    s.grid.domain_step = 1.0 / 8.0;
    s.time.t_final = 40.0;
    let path = write_scenario(out.path(), "narrow", &s);
    let o = sirs(out.path(), &["simulate", &path]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("domain too small"));
}

#[test]
fn disease_free_stationary_reports_and_exits_0() {
    let out = tempfile::tempdir().unwrap();
    let ext1 = scenarios().join("ext1.toml");
    let o = sirs(out.path(), &["stationary", ext1.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("disease-free"));
}

#[test]
fn reports_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let het1 = scenarios().join("het1.toml");
    for dir in [&a, &b] {
        let o = sirs(dir.path(), &["report", het1.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("het1/report/report.toml")).unwrap();
    assert_eq!(read(&a), read(&b));
    let report = sirs::cli::RunReport::from_toml_str(&String::from_utf8(read(&a)).unwrap()).unwrap();
    assert!(report.get("lambda1").unwrap().value < 0.0);
    assert_eq!(report.scenario, Scenario::from_path(&het1).unwrap());
}

#[test]
fn sweep_rerun_is_idempotent() {
    let out = tempfile::tempdir().unwrap();
    let sweep = scenarios().join("lambda-sweep.toml");
    let first = sirs(out.path(), &["sweep", sweep.to_str().unwrap()]);
    assert_eq!(first.status.code(), Some(0));
    let table = out.path().join("lambda-sweep/sweep/sweep.txt");
    let before = fs::read(&table).unwrap();
    let second = sirs(out.path(), &["sweep", sweep.to_str().unwrap()]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(fs::read(&table).unwrap(), before);
    assert_eq!(stdout(&first), stdout(&second));
    assert_eq!(stdout(&first).lines().count(), 5);
}

#[test]
fn sweep_without_axes_has_one_row() {
    let out = tempfile::tempdir().unwrap();
    let base = write_scenario(out.path(), "base", &presets::hom1());
    let spec = out.path().join("single.toml");
    fs::write(&spec, format!("base = {base:?}\noutputs = [\"eigen\"]\n")).unwrap();
    let o = sirs(out.path(), &["sweep", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].ends_with(" ok"));
}

#[test]
fn threshold_finds_critical_s0() {
    let out = tempfile::tempdir().unwrap();
    let hom1 = scenarios().join("hom1.toml");
    let o = sirs(
        out.path(),
        &["threshold", hom1.to_str().unwrap(), "--param", "s0.value", "--from", "0.1", "--to", "3"],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let v: f64 = text.rsplit("= ").next().unwrap().trim().parse().unwrap();
    assert!((v - 1.0).abs() < 1e-4);
}
