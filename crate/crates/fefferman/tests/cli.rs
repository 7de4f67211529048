use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fefferman")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["model", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(run(&[]).status.code(), Some(3));
    assert_eq!(run(&["no-such-suite"]).status.code(), Some(3));
    assert_eq!(run(&["cohomology", "--n", "9"]).status.code(), Some(3));
    assert_eq!(run(&["model", "--tolerance", "bogus=1"]).status.code(), Some(3));
    assert_eq!(run(&["model", "--tolerance", "chi=-1"]).status.code(), Some(3));
    assert_eq!(run(&["model", "--format", "yaml"]).status.code(), Some(3));
    assert_eq!(run(&["dump", "--algebra", "g2"]).status.code(), Some(3));
}

#[test]
fn cohomology_report_schema() {
    let out = run(&["cohomology", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "1");
    assert_eq!(v["suite"], "cohomology");
    assert_eq!(v["config"]["n"], 1);
    assert_eq!(v["summary"]["pass"], true);
    assert_eq!(v["summary"]["gating_failed"], 0);
    let names: Vec<&str> = v["sections"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["H1", "H2", "Hodge decomposition", "codifferential"]);
    for s in v["sections"].as_array().unwrap() {
        for c in s["checks"].as_array().unwrap() {
            assert!(c["name"].is_string() && c["pass"].is_boolean() && c["gating"].is_boolean());
        }
    }
}

#[test]
fn markdown_output() {
    let out = run(&["random-metrics", "--count", "2", "--format", "markdown"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# "));
    assert!(text.contains("| check | result | value | tolerance | detail |"));
    assert!(text.contains("Weyl trace-free"));
}

#[test]
fn failing_gate_exits_two_and_names_the_failure() {
    let out = run(&["random-metrics", "--count", "2", "--tolerance", "schouten=0"]);
    assert_eq!(json(&out)["summary"]["pass"], false);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
    let out = run(&["inclusions", "--seeds", "2", "--combos", "1", "--displays"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("display: image of x = u + jv"));
}

#[test]
fn tolerance_override_is_reported() {
    let v = json(&run(&["random-metrics", "--count", "1", "--tolerance", "divergence=1e-5"]));
    assert_eq!(v["tolerances"]["divergence"], 1e-5);
}

#[test]
fn out_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("fefferman-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dump.json");
    let a = run(&["dump", "--algebra", "cr", "--out", path.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert!(a.stdout.is_empty());
    let b = run(&["dump", "--algebra", "cr"]);
    assert_eq!(std::fs::read(&path).unwrap(), b.stdout);
    let v = json(&b);
    let alg = &v["sections"][0]["data"]["algebra"];
    assert_eq!(alg["dim"], 35);
    assert_eq!(alg["basis"].as_array().unwrap().len(), 35);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        &["model", "--samples", "3", "--rescale-seed", "7", "--seed", "4"][..],
        &["inclusions", "--seeds", "5", "--combos", "3", "--seed", "9"][..],
        &["random-metrics", "--count", "3", "--dim", "5"][..],
    ] {
        let (a, b) = (run(args), run(args));
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
