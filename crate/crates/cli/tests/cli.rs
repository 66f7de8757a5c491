use std::process::{Command, Output};

use quasihom::exhaustive::SumEstimate;
use quasihom::quasi::ExponentReport;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasihom"))
        .args(args)
        .env_remove("QH_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn analyze_reports_exponents() {
    let v = json(&["analyze", "y^4-2x^6"]);
    assert_eq!(v["h"], "12/5");
    assert_eq!(v["nu"], 0);
    let rep: ExponentReport = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(rep.classification.to_string(), "Regular");
    assert!(v["exceptional_primes"]["primes"].as_array().unwrap().contains(&Value::from(5)));

    let v = json(&["analyze", "x*y"]);
    assert_eq!(v["classification"], "Monomial(1,1)");
    assert_eq!((v["i"].clone(), v["nu"].clone()), (Value::from(0), Value::from(1)));

    let v = json(&["analyze", "y^4-4x^2y^2+4x^4", "--p", "17"]);
    assert_eq!(v["classification"], "Exceptional(2)");
    assert_eq!(v["local"]["i"], 1);
}

#[test]
fn rejected_input_exits_2() {
    assert_eq!(run(&["analyze", "x^2+y^3+1"]).status.code(), Some(2));
    assert_eq!(run(&["count", "x*y", "--p", "9", "--s", "1"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "x^2+"]).status.code(), Some(2));
}

#[test]
fn sums_and_counts() {
    let v = json(&["sum", "x*y", "--p", "3", "--s", "2"]);
    let est: SumEstimate = serde_json::from_value(v).unwrap();
    assert!((est.magnitude - 1.0 / 9.0).abs() < 1e-12);
    assert_eq!(json(&["count", "x*y", "--p", "3", "--s", "2"])["count"], "7/27");
    let v = json(&["sum", "x", "--p", "5", "--s", "1"]);
    assert_eq!(v["magnitude"], 0.0);
    assert_eq!(v["exact_zero"], true);
}

#[test]
fn budget_exits_3() {
    let out = run(&["count", "x*y", "--p", "101", "--s", "5", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_quasihom"))
        .args(["count", "x*y", "--p", "7", "--s", "2"])
        .env("QH_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_report() {
    let v = json(&["verify", "y^4-2x^6", "--target", "count", "--pmax", "13", "--smax", "3"]);
    assert!(v["upper"]["c_max"].as_f64().unwrap() <= 10.0);
    assert!(v["lower"].as_array().unwrap().iter().all(|l| l["pass"] == true));
    assert!(v["verdict"] == "PASS" || v["verdict"] == "FAIL");
    let v = json(&["verify", "x*y", "--target", "sum", "--pmax", "7", "--smax", "3"]);
    assert_eq!(v["verdict"], "PASS");
}

#[test]
fn sublevel_and_function_field() {
    let v = json(&["sublevel", "x^2*(x-1)", "--p", "5", "--s", "2", "--ell", "2"]);
    assert_eq!(v["residues"].as_array().unwrap().len(), 6);
    assert_eq!(v["balls"].as_array().unwrap().len(), 2);
    assert_eq!(v["matches"], true);
    assert_eq!(json(&["ff", "count", "x*y", "--p", "3", "--pi", "T", "--s", "1"])["count"], "5/9");
    let v = json(&["ff", "sum", "x*y", "--p", "3", "--pi", "1,0,1", "--s", "1"]);
    assert!((v["magnitude"].as_f64().unwrap() - 1.0 / 9.0).abs() < 1e-12);
    assert_eq!(run(&["ff", "count", "x*y", "--p", "5", "--pi", "T^2+1", "--s", "1"]).status.code(), Some(2));
}

#[test]
fn formats_and_output_file() {
    let out = run(&["count", "x*y", "--p", "3", "--s", "1", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "value,count\n0,5\n1,2\n2,2\n");
    let out = run(&["analyze", "x*y", "--format", "table"]);
    assert!(String::from_utf8(out.stdout).unwrap().lines().any(|l| l.starts_with("classification")));
    let path = std::env::temp_dir().join(format!("quasihom-cli-{}.json", std::process::id()));
    let out = run(&["count", "x", "--p", "5", "--s", "2", "--output", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["count"], "1/25");
    std::fs::remove_file(path).ok();
}

#[test]
fn deterministic_across_workers() {
    let a = run(&["sum", "y^3-2x^3", "--p", "7", "--s", "3", "--workers", "1"]);
    let b = run(&["sum", "y^3-2x^3", "--p", "7", "--s", "3", "--workers", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn regress_builtin_corpus() {
    let v = json(&["regress", "--budget", "200000"]);
    assert_eq!(v["passed"], v["total"]);
}
