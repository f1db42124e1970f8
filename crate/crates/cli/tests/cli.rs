//! Black-box tests of the shipped binary: exit codes, reproducible CSV
//! output, spec-file rejection, environment-variable validation and the
//! uncertified-kernel escape hatch.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hadamard"));
    // isolate from ambient overrides
    c.env_remove("HADAMARD_TOL").env_remove("HADAMARD_THREADS");
    c
}

fn write_spec(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).expect("write spec");
    path
}

const INDICATOR_SPEC: &str = r#"{
  "version": 1,
  "dimension": 1,
  "distributions": {
    "box": {
      "atoms": [
        { "density": { "indicator": { "lo": [1.0], "hi": [2.0] } } }
      ]
    },
    "osc": { "builtin": "oscillatory_exponential" },
    "halfline": { "builtin": "half_line_indicator" }
  },
  "test_functions": {
    "bump": [
      { "coeff": 1.0, "gamma": [0], "center": [1.0], "scale": [0.8] }
    ]
  }
}"#;

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn eig_csv_is_correct_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "spec.json", INDICATOR_SPEC);
    let run = || {
        bin()
            .args(["eig", "--spec"])
            .arg(&spec)
            .args(["--dist", "box", "--alpha-max", "3"])
            .output()
            .unwrap()
    };
    let a = run();
    assert_eq!(a.status.code(), Some(0), "stderr: {}", stderr(&a));
    let csv = stdout(&a);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("alpha_1,re,im,error_bound"));
    // first row is alpha = 0: m_0 = ln 2
    let row0 = lines.next().unwrap();
    let fields: Vec<&str> = row0.split(',').collect();
    assert_eq!(fields[0], "0");
    let m0: f64 = fields[1].parse().unwrap();
    assert!((m0 - std::f64::consts::LN_2).abs() <= 1e-10, "m0 = {m0}");
    // certificate goes to stderr, not into the CSV
    assert!(stderr(&a).contains("certificate:"));
    // bit-for-bit reproducible
    let b = run();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unknown_field_in_spec_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        &dir,
        "bad.json",
        r#"{ "version": 1, "dimension": 1, "distributions": {}, "test_functions": {}, "surprise": 3 }"#,
    );
    let o = bin()
        .args(["eig", "--spec"])
        .arg(&spec)
        .args(["--dist", "box"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("input rejected"));
}

#[test]
fn missing_decay_witness_is_rejected_with_predicate() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "spec.json", INDICATOR_SPEC);
    let o = bin()
        .args(["eig", "--spec"])
        .arg(&spec)
        .args(["--dist", "halfline"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("decay_witness"), "stderr: {}", stderr(&o));
}

#[test]
fn uncertified_kernel_escape_hatch() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "spec.json", INDICATOR_SPEC);
    // the oscillatory kernel's support touches the hyperplane: rejected by
    // default, with the failing predicate named
    let o = bin()
        .args(["apply", "--spec"])
        .arg(&spec)
        .args(["--dist", "osc", "--testfn", "bump", "--grid", "0.5:2:4"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("support_in_w_eps"), "stderr: {}", stderr(&o));

    // with the flag, a grid containing a zero coordinate is still rejected
    let o = bin()
        .args(["apply", "--spec"])
        .arg(&spec)
        .args([
            "--dist",
            "osc",
            "--testfn",
            "bump",
            "--grid",
            "-1:1:3",
            "--unsafe-off-hyperplane",
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nonzero_coordinates"), "stderr: {}", stderr(&o));

    // off the hyperplane the evaluation goes through
    let o = bin()
        .args(["apply", "--spec"])
        .arg(&spec)
        .args([
            "--dist",
            "osc",
            "--testfn",
            "bump",
            "--grid",
            "0.5:2:4",
            "--unsafe-off-hyperplane",
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(&o));
    let csv = stdout(&o);
    assert!(csv.starts_with("y_1,re,im,error_bound"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn environment_overrides_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "spec.json", INDICATOR_SPEC);
    for (var, value) in [
        ("HADAMARD_TOL", "1.5"),
        ("HADAMARD_TOL", "abc"),
        ("HADAMARD_THREADS", "0"),
        ("HADAMARD_THREADS", "-2"),
    ] {
        let o = bin()
            .env(var, value)
            .args(["eig", "--spec"])
            .arg(&spec)
            .args(["--dist", "box"])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(2), "{var}={value}");
        assert!(stderr(&o).contains(var), "{var}={value}: {}", stderr(&o));
    }
    // valid settings are accepted
    let o = bin()
        .env("HADAMARD_TOL", "1e-8")
        .env("HADAMARD_THREADS", "4")
        .args(["eig", "--spec"])
        .arg(&spec)
        .args(["--dist", "box", "--alpha-max", "2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(&o));
}

#[test]
fn verify_exit_codes() {
    let o = bin().args(["verify", "--suite", "no_such_suite"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown suite"));

    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    let o = bin()
        .args(["verify", "--suite", "decomposition", "--out"])
        .arg(&json_path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(&o));
    assert!(stdout(&o).contains("suite decomposition: PASS"));
    let json = std::fs::read_to_string(&json_path).unwrap();
    let reports: Vec<hadamard_cli::report::SuiteReport> = serde_json::from_str(&json).unwrap();
    assert_eq!(reports.len(), 1);
    assert!(reports[0].all_pass());
}
