use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dictgreedy"))
}

fn experiment(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("experiments").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_problems() {
    let o = run(&["--list-problems"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in ["quadratic-interior", "quadratic-outside", "power-interior", "logistic-toy"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn run_writes_all_outputs_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = experiment("rega_vs_ega.json");
    let o = run(&["run", cfg.to_str().unwrap(), "--out", out]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["rega.csv", "rega.trace.json", "ega-c.csv", "report.json", "summary.txt"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("meets target"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["runs"].as_array().unwrap().len(), 3);

    let v = run(&["run", cfg.to_str().unwrap(), "--out", out, "--verify"]);
    assert!(v.status.success(), "{}", stdout(&v));
}

#[test]
fn verify_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = experiment("rega_interior.json");
    assert!(run(&["run", cfg.to_str().unwrap(), "--out", out]).status.success());
    let csv = dir.path().join("rega.csv");
    let text = fs::read_to_string(&csv).unwrap().replacen("\n2,", "\n2,9", 1);
    fs::write(&csv, text).unwrap();
    let v = run(&["run", cfg.to_str().unwrap(), "--out", out, "--verify"]);
    assert_eq!(v.status.code(), Some(4));
    assert!(stdout(&v).contains("csv does not match"));
}

#[test]
fn compare_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = experiment("outside_hull.json");
    let o = run(&["compare", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(dir.path().join("comparison.txt")).unwrap();
    assert!(table.starts_with("algorithm"));
    assert_eq!(table.lines().count(), 5);
    let rows: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("comparison.json")).unwrap()).unwrap();
    assert_eq!(rows[1]["algorithm"], "egafr");
}

#[test]
fn compare_needs_two_algorithms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = experiment("rega_interior.json");
    let o = run(&["compare", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at least two"));
}

#[test]
fn invalid_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{"problem": "quadratic-interior", "algorithms": [{"name": "rega", "iterations": 5, "delta": 0.1}]}"#,
    )
    .unwrap();
    let o = run(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("algorithms[0].seed"), "{}", stderr(&o));

    fs::write(&cfg, r#"{"problem": "quadratic-interior", "algorithms": [{"name": "rega", "iterations": "x"}]}"#)
        .unwrap();
    let o = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("algorithms[0].iterations"), "{}", stderr(&o));
}

#[test]
fn runtime_error_yields_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("linear.json");
    fs::write(
        &cfg,
        r#"{"problem": {"objective": "linear", "a": [1.0, 0.5]},
            "algorithms": [{"name": "rega", "iterations": 5}, {"name": "egafr", "iterations": 2, "m_ls": 4}]}"#,
    )
    .unwrap();
    let o = run(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(dir.path().join("rega.csv").exists());
    assert!(!dir.path().join("egafr.csv").exists());
    let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("non-coercive"), "{summary}");
}

#[test]
fn missing_config_file() {
    let o = run(&["run", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(2));
}
