use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seifert-rt"))
        .args(args)
        .env_remove("SEIFERT_RT_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn lens_one_zero_is_inverse_rank() {
    let out = run(&[
        "invariant",
        "--algebra",
        "A1",
        "--level",
        "4",
        "--lens",
        "1",
        "0",
        "--no-cache",
    ]);
    assert!(out.status.success());
    let v = &json(&out)["results"][0]["value"];
    assert!((v[0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(v[1].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn poincare_sphere_methods_agree() {
    let out = run(&[
        "invariant",
        "--algebra",
        "A1",
        "--level",
        "5",
        "--seifert",
        "o;0|-1;(2,1),(3,1),(5,1)",
        "--method",
        "all",
        "--no-cache",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["results"].as_array().unwrap().len(), 2);
    assert_eq!(report["agreement"][0]["agree"], Value::Bool(true));
}

#[test]
fn malformed_spec_is_a_usage_error() {
    let out = run(&["invariant", "--level", "5", "--seifert", "o;0|-1;(2,1", "--no-cache"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unclosed pair"), "{err}");
    assert!(err.contains("position"), "{err}");
}

#[test]
fn bad_configuration_is_reported_at_once() {
    let out = run(&[
        "invariant",
        "--algebra",
        "E9",
        "--r-range",
        "9:1",
        "--lens",
        "3",
        "1",
        "--no-cache",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("E9") && err.contains("start exceeds end"), "{err}");
}

#[test]
fn clap_usage_errors_exit_two() {
    assert_eq!(run(&["invariant", "--level", "5"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn verify_examples_pass() {
    for args in [
        &["verify", "relations", "--algebra", "A1", "--level", "6"][..],
        &["verify", "reciprocity", "--trials", "100", "--seed", "7"],
        &["verify", "oracle", "--algebra", "A2", "--level", "4"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let report = json(&out);
        assert_eq!(report["passed"], Value::Bool(true));
        assert!(report["checks"]
            .as_array()
            .unwrap()
            .iter()
            .all(|c| c["cases"].as_u64().unwrap() > 0));
    }
}

#[test]
fn output_is_deterministic() {
    let args = [
        "invariant",
        "--lens",
        "7",
        "3",
        "--r-range",
        "3:9",
        "--method",
        "all",
        "--no-cache",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = ["verify", "reciprocity", "--trials", "30", "--seed", "11"];
    assert_eq!(run(&v).stdout, run(&v).stdout);
}

#[test]
fn cache_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "invariant",
        "--lens",
        "5",
        "2",
        "--level",
        "7",
        "--precision",
        "high",
        "--method",
        "all",
    ];
    let call = || {
        Command::new(env!("CARGO_BIN_EXE_seifert-rt"))
            .args(args)
            .env("SEIFERT_RT_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let fresh = call();
    assert!(fresh.status.success());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 5);
    let cached = call();
    assert_eq!(fresh.stdout, cached.stdout);
    let digits = &json(&cached)["results"][0]["digits"][0];
    assert!(digits.as_str().unwrap().len() > 30, "{digits}");
}

#[test]
fn csv_output_has_one_row_per_result() {
    let out = run(&[
        "invariant",
        "--lens",
        "3",
        "1",
        "--r-range",
        "3:6",
        "--format",
        "csv",
        "--no-cache",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("algebra,level,manifold,method"));
}

#[test]
fn asymptotics_writes_residual_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("res.csv");
    let out = run(&[
        "asymptotics",
        "--lens",
        "2",
        "1",
        "--order",
        "1",
        "--r-range",
        "20:80:2",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report = json(&out);
    let phases: Vec<&str> = report["phases"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(phases, ["0", "1/2"]);
    assert_eq!(report["fits"].as_array().unwrap().len(), 2);
    let table = std::fs::read_to_string(path).unwrap();
    assert_eq!(table.lines().count(), 1 + 2 * 31);
}

#[test]
fn arithmetic_subcommands_print_rationals() {
    let out = run(&["dedekind", "3", "7"]);
    assert_eq!(json(&out)["value"], "-1/14");
    let out = run(&["cf", "7", "-3"]);
    let cf = json(&out);
    assert_eq!(cf["value"], "-7/3");
    // m_t − 1/(⋯ − 1/m₁)
    let terms: Vec<i64> = cf["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t.as_i64().unwrap())
        .collect();
    let (n, d) = terms[1..].iter().fold((terms[0], 1), |(n, d), &m| (m * n - d, n));
    assert_eq!(n * -3, d * 7);
    let out = run(&[
        "rep",
        "--algebra",
        "A2",
        "--level",
        "5",
        "--matrix",
        "2,1,-3,-1",
        "--method",
        "both",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["max_discrepancy"].as_f64().unwrap() < 1e-12);
}

#[test]
fn describe_and_modular_data() {
    let out = run(&["describe", "--algebra", "D4"]);
    assert_eq!(json(&out)["dual_coxeter"], 6);
    let out = run(&["modular-data", "--algebra", "A1", "--level", "5", "--matrices"]);
    let md = json(&out);
    assert_eq!(md["index_set"].as_array().unwrap().len(), 4);
    assert_eq!(md["s_matrix"].as_array().unwrap().len(), 4);
}
