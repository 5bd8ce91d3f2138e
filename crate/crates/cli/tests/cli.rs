use std::process::Command;

use betaorder_cli::{run, CliError, EXIT_NUMERICAL, EXIT_OK, EXIT_REGIME, EXIT_USAGE, EXIT_VERIFY};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("betaorder").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = call(args);
    assert_eq!(code, EXIT_OK, "{args:?}: {err}");
    out
}

fn schema() -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/output.schema.json")).unwrap();
    let value: Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&value).unwrap()
}

fn assert_valid(text: &str) {
    let value: Value = serde_json::from_str(text).unwrap();
    let compiled = schema();
    let msgs: Vec<String> = match compiled.validate(&value) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "schema violations: {msgs:#?}");
}

#[test]
fn json_outputs_match_the_schema() {
    let runs: [&[&str]; 7] = [
        &["--no-cache", "marginal", "--family", "laguerre", "--beta", "1", "--lambda1", "-1/2", "--nmax", "3", "--format", "json"],
        &["--no-cache", "marginal", "--family", "jacobi", "--beta", "2", "--lambda1", "1", "--lambda2", "1/2", "--nmax", "3", "--format", "json"],
        &["--no-cache", "fixed-trace", "--beta", "1", "--lambda1", "-1/2", "--nmax", "3", "--format", "json"],
        &["--no-cache", "conductance", "--n1", "3", "--n2", "3", "--beta", "1", "--format", "json"],
        &["--no-cache", "gf-zeros", "--family", "laguerre", "--beta", "1", "--lambda1", "1", "--nmax", "3", "--x", "1,4", "--format", "json"],
        &["--no-cache", "gf-zeros", "--family", "laguerre", "--beta", "1", "--lambda1", "-1/2", "--nmax", "3", "--x", "3/10,1/2", "--fixed-trace", "--format", "json"],
        &["verify", "--suite", "odd-even", "--format", "json"],
    ];
    for args in runs {
        assert_valid(&ok(args));
    }
}

#[test]
fn schema_rejects_malformed_records() {
    let out = ok(&["--no-cache", "conductance", "--n1", "2", "--n2", "2", "--beta", "1", "--format", "json"]);
    let mut value: Value = serde_json::from_str(&out).unwrap();
    value["pdf"]["terms"][0]["sign"] = Value::from(3);
    assert!(!schema().is_valid(&value));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let args = ["--no-cache", "marginal", "--family", "jacobi", "--beta", "1", "--lambda1", "2", "--lambda2", "1", "--nmax", "4", "--format", "json"];
    assert_eq!(ok(&args), ok(&args));
    let grid = ["--no-cache", "marginal", "--family", "laguerre", "--beta", "2", "--lambda1", "0", "--nmax", "3", "--format", "csv-grid", "--grid-points", "7"];
    let a = ok(&grid);
    assert_eq!(a, ok(&grid));
    assert_eq!(a.lines().count(), 8);
    assert!(a.starts_with("x,pdf_1,pdf_2,pdf_3,cdf_1,cdf_2,cdf_3\n"));
}

#[test]
fn orderings_give_identical_output() {
    let base = ["--no-cache", "marginal", "--family", "laguerre", "--beta", "3", "--lambda1", "1", "--nmax", "4", "--format", "json", "--order"];
    let row = ok(&[&base[..], &["row-major"]].concat());
    for order in ["antidiagonal", "wavefront"] {
        assert_eq!(ok(&[&base[..], &[order]].concat()), row, "{order}");
    }
}

#[test]
fn cache_round_trip_preserves_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = |cache: &[&'static str]| {
        let mut v: Vec<&str> = cache.to_vec();
        v.extend(["marginal", "--family", "laguerre", "--beta", "1", "--lambda1", "1/2", "--nmax", "3", "--format", "json"]);
        v
    };
    let fresh = ok(&args(&["--no-cache"]));
    let first = ok(&[&["--cache-dir", d][..], &args(&[])].concat());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 6);
    let second = ok(&[&["--cache-dir", d][..], &args(&[])].concat());
    assert_eq!(fresh, first);
    assert_eq!(fresh, second);
}

#[test]
fn conductance_text_lists_each_interval() {
    let out = ok(&["--no-cache", "conductance", "--n1", "3", "--n2", "3", "--beta", "1"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4, "{out}");
    assert_eq!(lines[1], "0 < g < 1: (6/7*pi^(0/2))*g^(7/2)");
    assert!(lines[2].starts_with("1 < g < 2: "));
    assert!(lines[3].starts_with("2 < g < 3: ") && lines[3].contains("(g-2)^(5/2)"));
}

#[test]
fn gf_zeros_reports_negative_real_roots() {
    let out = ok(&["--no-cache", "gf-zeros", "--family", "laguerre", "--beta", "1", "--lambda1", "1", "--nmax", "3", "--x", "4", "--precision", "30"]);
    assert!(out.contains("x0 = 4: degree 3, log-concave yes"), "{out}");
    assert!(out.contains("  -12.7103698966"), "{out}");
    assert_eq!(out.matches("[negative-real]").count(), 3);
    let csv = ok(&["--no-cache", "gf-zeros", "--family", "laguerre", "--beta", "1", "--lambda1", "1", "--nmax", "3", "--x", "4", "--format", "csv"]);
    assert!(csv.starts_with("x0,re,im,class,log_concave\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn samples_are_reproducible() {
    let args = |seed: &'static str| ["sample", "--family", "jacobi", "--beta", "2", "--lambda1", "1", "--lambda2", "0", "--N", "3", "--trials", "2500", "--seed", seed];
    let a = ok(&args("11"));
    assert_eq!(a, ok(&args("11")));
    assert_ne!(a, ok(&args("12")));
    assert!(a.starts_with("trial,x1,x2,x3\n"));
    assert_eq!(a.lines().count(), 2501);
    for line in a.lines().skip(1) {
        let v: Vec<f64> = line.split(',').skip(1).map(|s| s.parse().unwrap()).collect();
        assert!(v.windows(2).all(|w| w[0] >= w[1]) && v.iter().all(|&x| x > 0.0 && x < 1.0));
    }
}

#[test]
fn errors_map_to_exit_codes() {
    assert_eq!(call(&["bogus"]).0, EXIT_USAGE);
    assert_eq!(call(&["marginal", "--family", "laguerre", "--beta", "1", "--nmax", "2"]).0, EXIT_USAGE);
    assert_eq!(call(&["--no-cache", "marginal", "--family", "jacobi", "--beta", "1", "--lambda1", "0", "--nmax", "2"]).0, EXIT_USAGE);
    assert_eq!(call(&["--no-cache", "marginal", "--family", "laguerre", "--beta", "1", "--lambda1", "0", "--nmax", "2", "--n", "3"]).0, EXIT_USAGE);
    let (code, _, err) = call(&["--no-cache", "marginal", "--family", "laguerre", "--beta", "2", "--lambda1", "1/3", "--nmax", "2"]);
    assert_eq!(code, EXIT_REGIME, "{err}");
    assert_eq!(call(&["sample", "--family", "laguerre", "--beta", "4", "--lambda1", "0", "--N", "2"]).0, EXIT_REGIME);
    assert_eq!(call(&["--help"]).0, EXIT_OK);
    assert_eq!(CliError::Verification("x".into()).exit_code(), EXIT_VERIFY);
    assert_eq!(CliError::Core(betaorder::Error::Numerical("x".into())).exit_code(), EXIT_NUMERICAL);
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_betaorder");
    let out = Command::new(bin)
        .args(["--no-cache", "marginal", "--family", "laguerre", "--beta", "2", "--lambda1", "1/2", "--nmax", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_REGIME));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: parameter regime not supported"));
    let out = Command::new(bin).args(["verify", "--suite", "odd-even"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[PASS]  7 odd-even"));
}
