use std::path::Path;
use std::process::Command;

use ftgap::asymptotics::asy_one_gap;
use ftgap::cli::{exit_code, run, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, SCAN_HEADER};
use ftgap::Error;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn ftgap(cache: &Path, args: &[&str]) -> Outcome {
    let dir = cache.to_string_lossy().into_owned();
    let env = move |k: &str| (k == "FTGAP_CACHE_DIR").then(|| dir.clone());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("ftgap").chain(args.iter().copied());
    let code = run(argv, &env, &mut out, &mut err);
    Outcome { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

/// The named CSV column of the only data row.
fn field(csv: &str, name: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    row[k].to_string()
}

#[test]
fn eval_quad_at_zero_width() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftgap(dir.path(), &["eval", "--x", "0", "--s", "3", "--method", "quad"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(field(&o.stdout, "log_d").parse::<f64>().unwrap(), 0.0);
}

#[test]
fn eval_forced_one_gap_passes_the_formula_through() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftgap(dir.path(), &["eval", "--x", "2", "--s", "100", "--method", "thm2"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v: f64 = field(&o.stdout, "log_d").parse().unwrap();
    assert_eq!(v, asy_one_gap(2.0, 100.0).unwrap());
    assert_eq!(field(&o.stdout, "truth"), "");
}

#[test]
fn eval_forced_formula_outside_its_regime_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftgap(dir.path(), &["eval", "--x", "8", "--s", "4", "--method", "thm2"]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("thm2"), "{}", o.stderr);
    assert!(o.stdout.is_empty());
}

#[test]
fn eval_auto_with_truth_in_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftgap(dir.path(), &["--format", "json", "eval", "--x", "6", "--s", "-2"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["regime"], "no-gap");
    assert!(v["residual"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn scan_grid_is_complete_ordered_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["scan", "--x-range", "1:3:1", "--s-range", "-4:16:10"];
    let first = ftgap(dir.path(), &args);
    assert_eq!(first.code, EXIT_OK, "{}", first.stderr);
    let lines: Vec<&str> = first.stdout.lines().collect();
    assert_eq!(lines[0], SCAN_HEADER);
    assert_eq!(lines.len(), 10);
    let s_of = |l: &str| l.split(',').nth(1).unwrap().parse::<f64>().unwrap();
    assert!(lines[1..].windows(2).all(|w| s_of(w[0]) <= s_of(w[1])));
    assert_eq!(ftgap(dir.path(), &args).stdout, first.stdout);
}

#[test]
fn scan_quad_reports_truth_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftgap(dir.path(), &["scan", "--x-range", "0.5:1:0.5", "--s-range", "0", "--method", "quad"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    for row in o.stdout.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[5], "");
        assert!(cols[6].parse::<f64>().unwrap() < 0.0);
    }
}

#[test]
fn painleve_table_is_cached() {
    let dir = tempfile::tempdir().unwrap();
    let first = ftgap(dir.path(), &["--format", "json", "painleve", "pv"]);
    assert_eq!(first.code, EXIT_OK, "{}", first.stderr);
    let a: serde_json::Value = serde_json::from_str(&first.stdout).unwrap();
    assert_eq!(a["cache_hit"], false);
    let b: serde_json::Value = serde_json::from_str(&ftgap(dir.path(), &["--format", "json", "painleve", "pv"]).stdout).unwrap();
    assert_eq!(b["cache_hit"], true);
    assert_eq!(a["max_residual"], b["max_residual"]);
    assert!(Path::new(b["cache_file"].as_str().unwrap()).starts_with(dir.path()));
}

#[test]
fn painleve_window_out_of_range_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftgap(dir.path(), &["painleve", "pii", "--t-min", "-4"]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn validate_prints_a_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = ftgap(dir.path(), &["validate", "--suite", "painleve"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["suite"], "painleve");
    assert_eq!(v["failed"], 0);
    assert!(!v["checks"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_arguments_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["frobnicate"][..],
        &["eval", "--x", "1"],
        &["eval", "--x", "one", "--s", "0"],
        &["--format", "xml", "eval", "--x", "1", "--s", "0"],
        &["scan", "--x-range", "1:2", "--s-range", "0"],
        &["scan", "--x-range", "2:1:0.5", "--s-range", "0"],
        &["validate", "--suite", "everything"],
        &["--nodes", "4", "eval", "--x", "1", "--s", "0"],
        &["eval", "--x", "-1", "--s", "0"],
    ] {
        assert_eq!(ftgap(dir.path(), args).code, EXIT_USAGE, "{args:?}");
    }
}

#[test]
fn numerical_failures_map_to_their_exit_code() {
    assert_eq!(exit_code(&Error::Conditioning { pivot: 1e-17 }), EXIT_NUMERICAL);
    assert_eq!(exit_code(&Error::Newton { iterations: 50, residual: 1.0 }), EXIT_NUMERICAL);
    assert_eq!(exit_code(&Error::Regime("x".into())), EXIT_USAGE);
    assert_eq!(exit_code(&Error::Cache("x".into())), EXIT_USAGE);
}

fn binary() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ftgap"));
    c.env_remove("FTGAP_CONFIG").env_remove("FTGAP_CACHE_DIR");
    c
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let status = |c: &mut Command| c.output().unwrap().status.code().unwrap();
    assert_eq!(status(binary().arg("--help")), EXIT_OK);
    assert_eq!(status(binary().args(["eval", "--s", "0"])), EXIT_USAGE);
    let out = binary().env("FTGAP_CACHE_DIR", dir.path()).args(["eval", "--x", "1", "--s", "-2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("x,s,method,log_d,"));
}

#[test]
fn binary_reports_validation_failure_on_a_tampered_table() {
    let dir = tempfile::tempdir().unwrap();
    let built = binary().env("FTGAP_CACHE_DIR", dir.path()).args(["--format", "json", "painleve", "pv"]).output().unwrap();
    let summary: serde_json::Value = serde_json::from_slice(&built.stdout).unwrap();
    let path = summary["cache_file"].as_str().unwrap().to_string();
    // same header, v scaled by 1.001
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let mut tampered = format!("{}\n{}\n", lines.next().unwrap(), lines.next().unwrap());
    for row in lines {
        let mut cols: Vec<String> = row.split(',').map(str::to_string).collect();
        cols[1] = format!("{:.16e}", cols[1].parse::<f64>().unwrap() * 1.001);
        tampered.push_str(&cols.join(","));
        tampered.push('\n');
    }
    std::fs::write(&path, tampered).unwrap();
    let out = binary().env("FTGAP_CACHE_DIR", dir.path()).args(["validate", "--suite", "painleve"]).output().unwrap();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION), "{report}");
    assert_eq!(report["passed"], false);
}
