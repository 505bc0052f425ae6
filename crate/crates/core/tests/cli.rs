use std::fs;
use std::process::{Command, Output};

fn isosym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isosym")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn norm_prints_compact_decimal() {
    let o = isosym(&["norm", "--space", "lorentz:2,1", "--indicator", "0.25"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1.0\n");
}

#[test]
fn verify_writes_certificates_and_report_reads_them() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = isosym(&["verify", "theorem32", "--grid", "512", "--out", d]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json = dir.path().join("theorem32.json");
    let csv = fs::read_to_string(dir.path().join("theorem32.csv")).unwrap();
    assert!(csv.starts_with("inequality_id,family,params,n_grid,status,sup_ratio,instance,lhs,rhs,ratio\n"));
    let r = isosym(&["report", json.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    let ids: Vec<String> = stdout(&r).lines().skip(1).map(|l| l.split(',').next().unwrap().to_string()).collect();
    assert_eq!(ids, ["bobkov", "halfspace", "ledoux", "reafun"]);
}

#[test]
fn report_of_nothing_is_header_only() {
    let o = isosym(&["report"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn malformed_certificate_names_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "[\n{\"inequality_id\": ?}\n]\n").unwrap();
    let o = isosym(&["report", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json:2:"), "{err}");
}

#[test]
fn bad_arguments_exit_64() {
    assert_eq!(isosym(&["verify", "theorem32", "--grid", "96"]).status.code(), Some(64));
    assert_eq!(isosym(&["verify", "theorem32", "--tol-quad", "0"]).status.code(), Some(64));
    assert_eq!(isosym(&["verify", "nash", "--measure", "gaussian", "--grid", "64"]).status.code(), Some(64));
    assert_eq!(isosym(&["frobnicate"]).status.code(), Some(64));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "measure=gaussian\ngrid=256\n").unwrap();
    let o = isosym(&["profile", "--config", cfg.to_str().unwrap(), "--t", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    // φ(0) of the standard Gaussian
    assert!(stdout(&o).starts_with("exact\t0.398942280401"), "{}", stdout(&o));
}

#[test]
fn profile_table_has_one_row_per_node() {
    let o = isosym(&["profile", "--grid", "64", "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "t,exact_profile,estimator");
    assert!(text.lines().count() > 64);
}
