use std::path::Path;
use std::process::{Command, Output};

use sparsedom_cli::summary::Summary;

fn sparsedom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparsedom")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SPARSE: &str = r#"
name = "bad"
kind = "sparse-linear"
seed = 1
time_budget_s = 10

[space]
mode = "grid"
exponents = [1.0]
step = 1.0
extent = [64.0]

[operator]
family = "hilbert"

[functions]
f1 = ["random"]
f2 = ["random"]
host_scale = 4

[exponents]
p1 = 3.0
p2 = 2.0

[truncation]
sigma = 0
tau = 4
"#;

fn write(dir: &Path, text: &str) -> String {
    let p = dir.join("scenario.toml");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn exponents_outside_the_admissible_range_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = sparsedom(&["run", "--config", &write(dir.path(), SPARSE)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("1 ≤ p1 ≤ p2′"), "{}", stderr(&o));
}

#[test]
fn unknown_keys_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let text = SPARSE.replace("p1 = 3.0", "p1 = 1.0").replace("seed = 1", "seed = 1\ncolour = \"red\"");
    let o = sparsedom(&["run", "--config", &write(dir.path(), &text)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));
}

#[test]
fn oversized_grids_report_memory() {
    let dir = tempfile::tempdir().unwrap();
    let text = SPARSE.replace("p1 = 3.0", "p1 = 1.0").replace("extent = [64.0]", "extent = [1e9]");
    let o = sparsedom(&["run", "--config", &write(dir.path(), &text)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("MB") || stderr(&o).contains("MiB"), "{}", stderr(&o));
}

#[test]
fn list_and_describe() {
    let o = sparsedom(&["list"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).lines().count() >= 9);
    let o = sparsedom(&["describe", "sparse-linear"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("required"));
    assert_eq!(code(&sparsedom(&["describe", "bogus"])), 1);
    assert_eq!(code(&sparsedom(&["run", "no_such_scenario"])), 1);
}

#[test]
fn every_bundled_scenario_parses() {
    for b in sparsedom_cli::scenarios::BUNDLED {
        let s = sparsedom_cli::config::parse(b.text, &[]).unwrap_or_else(|e| panic!("{}: {e}", b.name));
        assert_eq!(s.name, b.name);
    }
}

#[test]
fn whitney_demo_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w");
    let o = sparsedom(&["run", "whitney_demo", "--out", out.to_str().unwrap(), "--threads", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(out.join("cover.csv").exists());
    let s = Summary::read_csv(&out.join("summary.csv")).unwrap();
    assert_eq!(s.rows.iter().filter(|r| r.check.starts_with("whitney_(")).count(), 6);
    assert!(s.all_pass());
}

#[test]
fn failed_checks_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    let o = sparsedom(&["run", "telescoping", "--out", out.to_str().unwrap(), "--override", "check.telescope_tol=0.0"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let s = Summary::read_csv(&out.join("summary.csv")).unwrap();
    assert!(!s.get("telescoping").unwrap().pass);
}

#[test]
fn seed_flag_changes_the_instances() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, seed) in [(&a, "1"), (&b, "2")] {
        let o = sparsedom(&["run", "whitney_demo", "--out", out.to_str().unwrap(), "--seed", seed]);
        assert_eq!(code(&o), 0);
    }
    let read = |p: &Path| std::fs::read(p.join("instances.csv")).unwrap();
    assert_ne!(read(&a), read(&b));
}
