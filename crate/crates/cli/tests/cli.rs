use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn schroflat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schroflat")).args(args).output().expect("binary runs")
}

fn small_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("scenario.json");
    let text = format!(
        r#"{{
  "sampling": {{"phase1": 30, "phase2": 30}},
  "solver": {{"nx": 63, "nt": 256}},
  "snapshots": 5{extra}
}}"#
    );
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out = dir.path().join("out");
    let o = schroflat(&["run", "-c", &cfg, "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let control = fs::read_to_string(out.join("control.csv")).unwrap();
    assert!(control.starts_with("t,phase,re,im\n"));
    let last = control.lines().last().unwrap();
    assert!(last.ends_with(",2,0.0000000000000000e0,0.0000000000000000e0"), "{last}");
    let snaps = fs::read_to_string(out.join("snapshots.csv")).unwrap();
    assert_eq!(snaps.lines().count(), 1 + 5 * 65);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    for key in ["final_l2_error", "expansion_order_achieved", "tail_diagnostic", "parseval_defect", "timings"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn synthesize_then_simulate_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(schroflat(&["run", "-c", &cfg, "-o", a.to_str().unwrap()]).status.success());
    assert!(schroflat(&["synthesize", "-c", &cfg, "-o", b.to_str().unwrap()]).status.success());
    assert_eq!(fs::read(a.join("control.csv")).unwrap(), fs::read(b.join("control.csv")).unwrap());
    assert!(schroflat(&["simulate", "-c", &cfg, "-o", b.to_str().unwrap()]).status.success());
    assert_eq!(fs::read(a.join("snapshots.csv")).unwrap(), fs::read(b.join("snapshots.csv")).unwrap());
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out = dir.path().join("o");
    let o = schroflat(&["simulate", "-c", &cfg, "-o", out.to_str().unwrap(), "--nx", "31", "--control", "missing.csv"]);
    assert_eq!(o.status.code(), Some(2));
    let o = schroflat(&["synthesize", "-c", &cfg, "-o", out.to_str().unwrap(), "--T", "0.3"]);
    assert!(o.status.success());
    let control = fs::read_to_string(out.join("control.csv")).unwrap();
    assert!(control.lines().last().unwrap().starts_with("2.9999999999999999e-1,2,"));
}

#[test]
fn invalid_input_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"tua": 0.1}"#).unwrap();
    assert_eq!(schroflat(&["synthesize", "-c", bad.to_str().unwrap()]).status.code(), Some(2));
    let cfg = small_config(dir.path(), "");
    assert_eq!(schroflat(&["synthesize", "-c", &cfg, "--tau", "0.5"]).status.code(), Some(2));
    assert_eq!(schroflat(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let control = dir.path().join("huge.csv");
    fs::write(&control, "t,phase,re,im\n0,1,1.7e308,0\n0.4,2,1.7e308,0\n").unwrap();
    let out = dir.path().join("o");
    let o = schroflat(&["simulate", "-c", &cfg, "-o", out.to_str().unwrap(), "--control", control.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unstable"));
}

#[test]
fn fourier_analyze_writes_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out = dir.path().join("f");
    let o = schroflat(&["fourier-analyze", "-c", &cfg, "-o", out.to_str().unwrap(), "--n-bar", "64"]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out.join("fourier.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 128);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report["parseval_defect"].as_f64().unwrap() > 0.0);
}

#[test]
fn selftest_passes() {
    let o = schroflat(&["selftest"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}
