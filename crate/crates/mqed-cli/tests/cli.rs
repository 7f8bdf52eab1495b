//! End-to-end tests of the `mqed` binary: exit codes, report files,
//! determinism across reruns and thread counts, and configuration
//! diagnostics.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mqed(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mqed"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const BASE_CONFIG: &str = "\
[run]
output_dir = out
seed = 11

[model lorentz]
electric = 0.8 1.0 0.2

[structure slab]
layer = -0.5 0.5 lorentz

[suite kk]
check = kramers-kronig
model = lorentz
omega = 0.4:3.0:3

[suite plem]
check = plemelj-limit
radius = 200
sigma = 1

[suite ang]
check = angular-completeness
omega = 1.1
pairs = 4
";

#[test]
fn list_prints_registry_with_anchors() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mqed(&["list"], tmp.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.len() >= 15, "registry has {} entries", lines.len());
    for line in &lines {
        assert!(line.contains("anchor="), "missing anchor in: {line}");
    }
}

#[test]
fn version_prints_package_version() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mqed(&["version"], tmp.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(env!("CARGO_PKG_VERSION")), "got: {text}");
}

#[test]
fn check_writes_reports_and_exits_zero_on_success() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.cfg", BASE_CONFIG);
    let out = mqed(&["check", &cfg], tmp.path());
    assert!(
        out.status.success(),
        "stdout: {} stderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );

    let jsonl = fs::read_to_string(tmp.path().join("out/reports.jsonl")).unwrap();
    let lines: Vec<&str> = jsonl.lines().collect();
    // Isolated timestamp line, then one line per check:
    // kk 3 omegas x 2 channels + 1 plemelj + 4 angular pairs.
    assert!(lines[0].contains("run_started_unix"));
    assert_eq!(lines.len(), 1 + 6 + 1 + 4);
    for line in &lines[1..] {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["name", "anchor", "params", "abs_err", "rel_err", "tol", "pass"] {
            assert!(v.get(key).is_some(), "report line missing '{key}': {line}");
        }
        assert_eq!(v["pass"], serde_json::Value::Bool(true), "failed check: {line}");
    }
    for suite in ["kk", "plem", "ang"] {
        let csv = fs::read_to_string(tmp.path().join(format!("out/{suite}.csv"))).unwrap();
        assert!(csv.starts_with("name,"), "missing CSV header for {suite}");
        assert!(csv.lines().count() > 1, "empty CSV for {suite}");
    }

    // Summary accounting is consistent.
    let summary: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    assert_eq!(summary["total"], serde_json::json!(11));
    assert_eq!(summary["failed"], serde_json::json!(0));
}

#[test]
fn reruns_and_thread_counts_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.cfg", BASE_CONFIG);
    let body = |out_dir: &str, jobs: &str| {
        let out = mqed(&["--out", out_dir, "--jobs", jobs, "check", &cfg], tmp.path());
        assert!(out.status.success());
        let text = fs::read_to_string(tmp.path().join(out_dir).join("reports.jsonl")).unwrap();
        // Drop the isolated timestamp line; the rest must be byte-identical.
        text.splitn(2, '\n').nth(1).unwrap().to_string()
    };
    let serial_a = body("a", "1");
    let serial_b = body("b", "1");
    let parallel = body("c", "8");
    assert_eq!(serial_a, serial_b, "rerun changed the report stream");
    assert_eq!(serial_a, parallel, "thread count changed the report stream");
}

#[test]
fn tolerance_scale_rescales_pass_marks() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.cfg", BASE_CONFIG);
    // A vanishing tolerance fails every check with nonzero error (a few
    // identities hold exactly in floating point and survive any scale).
    let out = mqed(&["--out", "t", "--tol-scale", "1e-30", "check", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let summary: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    let failed = summary["failed"].as_u64().unwrap();
    assert!(failed >= 8, "only {failed} of 11 checks failed under tol-scale 1e-30");
}

#[test]
fn missing_config_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mqed(&["check", "no-such-file.cfg"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-file.cfg"));
}

#[test]
fn undefined_names_are_diagnosed_by_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.cfg",
        "[suite s]\ncheck = completeness-1d\nstructure = ghost\nomega = 1.0\n",
    );
    let out = mqed(&["check", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("ghost"),
        "diagnostic should name the unresolved structure"
    );
}

#[test]
fn empty_suite_list_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg =
        write_config(tmp.path(), "empty.cfg", "[run]\nseed = 1\n[model m]\nelectric = 1 1 0.1\n");
    let out = mqed(&["check", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("suite"));
}

#[test]
fn malformed_grid_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "grid.cfg",
        "[model m]\nelectric = 1 1 0.1\n[suite s]\ncheck = kramers-kronig\nmodel = m\nomega = 3.0:0.4:5\n",
    );
    let out = mqed(&["check", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("omega"));
}

#[test]
fn demo_defect_emits_monotone_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mqed(&["--out", "demo", "demo-defect"], tmp.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("demo/defect_vs_filling.csv")).unwrap();
    let defects: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(defects.len(), 4);
    for pair in defects.windows(2) {
        assert!(
            pair[1] < pair[0],
            "defect should fall as the absorber fills the box: {defects:?}"
        );
    }
    // The box-filling limit leaves only a small scattering remainder.
    assert!(defects[3] < 0.05, "full-box defect {}", defects[3]);
}
