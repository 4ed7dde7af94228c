//! The binary's file contracts and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bergman-bands"));
    c.env_remove("BERGMAN_BAND_THREADS");
    c
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn write_config(dir: &Path, body: &str) {
    std::fs::write(dir.join("run.json"), body).unwrap();
}

#[test]
fn disc_spec_rows_reproduce_targets() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["disc-spec", "--targets", "0.3,0.2,0.1", "--n", "10"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["n", "lambda"]);
    let rows: Vec<(usize, f64)> = rdr.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 10);
    for (n, want) in [(1, 0.3), (2, 0.2), (3, 0.1)] {
        assert_eq!(rows[n].0, n);
        assert!((rows[n].1 - want).abs() < 1e-8);
    }
}

#[test]
fn floquet_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["floquet-check", "--M", "16", "--trials", "10"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn bands_writes_header_and_reruns_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), r#"{"targets": [0.3, 0.2, 0.1], "epsilon": 0.02, "eta_points": 5}"#);
    let out = run(&["bands", "--config", "run.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let first = std::fs::read_to_string(dir.path().join("bands.csv")).unwrap();
    assert!(first.starts_with("eta,n,lambda\n"));
    assert_eq!(first.lines().count(), 1 + 5 * 12);
    let out = run(&["--threads", "1", "bands", "--config", "run.json", "-o", "again.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(first, std::fs::read_to_string(dir.path().join("again.csv")).unwrap());
}

#[test]
fn run_writes_all_outputs_and_report_rederives() {
    let dir = tempfile::tempdir().unwrap();
    write_config(
        dir.path(),
        r#"{"targets": [0.3, 0.2, 0.1], "epsilon": 0.02, "eta_points": 17,
            "outputs": {"bands": "out/bands.csv", "report": "out/report.json", "diagnostics": "out/diag.json"}}"#,
    );
    let out = bin()
        .args(["run", "--config", "run.json"])
        .env("BERGMAN_BAND_THREADS", "1")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "pass");
    assert!(dir.path().join("out/diag.json").exists());

    let delta = report["delta"].as_f64().unwrap().to_string();
    let out = run(
        &["report", "--bands", "out/bands.csv", "--targets", "0.3,0.2,0.1", "--epsilon", "0.02", "--delta", &delta],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let again: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(again["components"], report["components"]);
    assert_eq!(again["delta_achieved"], report["delta_achieved"]);

    let out = run(
        &["report", "--bands", "out/bands.csv", "--targets", "0.3,0.2,0.1", "--epsilon", "0.0001", "--delta", &delta],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn synth_writes_profile_document() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["synth", "--targets", "0.3,0.2,0.1", "-o", "p.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("p.json")).unwrap()).unwrap();
    assert_eq!(doc["R0"], 0.3);
    assert_eq!(doc["coeffs"].as_array().unwrap().len(), 3);
    let out = run(&["disc-spec", "--profile", "p.json", "--n", "4"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn study_h_and_conformal_check_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["study-h", "--targets", "0.3,0.2,0.1", "--h-list", "0.1,0.05"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("h,n,disc,band,error\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 3);
    let out = run(&["conformal-check", "--alpha", "0.3"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_and_numerical_errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["nonsense"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["synth"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["synth", "--targets", "0.3", "--R0", "0.6"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["bands", "--config", "missing.json"], dir.path()).status.code(), Some(2));
    let out = run(&["synth", "--targets", "0.7,0.6,0.5,0.4,0.3,0.2,0.1"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "ill_conditioned");
    write_config(dir.path(), r#"{"targets": [0.3], "epsilon": 0.02, "eta_points": 4}"#);
    assert_eq!(run(&["run", "--config", "run.json"], dir.path()).status.code(), Some(2));
}
