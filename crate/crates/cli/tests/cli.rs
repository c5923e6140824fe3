use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasespace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("phasespace-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn check_exit_codes() {
    let out = run(&["check", "--rule", "eca:204", "--formula", "E x. x->x"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"], true);

    let out = run(&["check", "--rule", "eca:51", "--formula", "E x. x->x"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"], false);

    let out = run(&["check", "--rule", "eca:90", "--formula", "Ecard[4] x. x->x"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["cardinality"], "finite:4");
}

#[test]
fn check_errors_are_diagnostic_json() {
    let out = run(&["check", "--rule", "eca:90", "--formula", "E x. (x->"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "parse");
    assert_eq!(v["error"]["detail"]["line"], 1);

    let out = run(&["check", "--rule", "eca:90", "--formula", "E x. x->y"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "validate");

    let out = run(&["check", "--rule", "eca:300", "--formula", "true"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "rule");

    let out = run(&["check", "--rule", "eca:110", "--state-budget", "3", "--formula", "A y. E x. x->y"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "resource");

    let out = run(&["check", "--rule", "eca:90", "--state-budget", "0", "--formula", "true"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["check", "--rule", "eca:90", "--formula", "E (x,y). (x->y & ~(x=y))"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["props", "eca:90"]);
    let b = run(&["props", "eca:90"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn predicates_and_files() {
    let zero = scratch("zero.txt", "(0)^w (0)^w\n");
    let formula = scratch("f.txt", "E (x,y). (x->y & In[zero](y) & ~(x=y))");
    let pred = format!("zero={}", zero.display());
    let out = run(&[
        "check",
        "--rule",
        "eca:90",
        "--pred",
        &pred,
        "--formula-file",
        formula.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["witness"]["y"], "(0)^w (0)^w");
    assert_ne!(v["witness"]["x"], "(0)^w (0)^w");

    let table = scratch(
        "shift.txt",
        "states: 0,1\nradius: 1\nquiescent: 0\n000 -> 0\n001 -> 1\n010 -> 0\n011 -> 1\n100 -> 0\n101 -> 1\n110 -> 0\n111 -> 1\n",
    );
    let out = run(&["check", "--rule", table.to_str().unwrap(), "--formula", "Ecard[2] x. x->x"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn json_file_matches_stdout() {
    let path = scratch("out.json", "");
    let out = run(&["props", "eca:204", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
}

#[test]
fn props_reports() {
    let v = json(&run(&["props", "eca:204"]));
    assert_eq!(v["surjective"], true);
    assert_eq!(v["injective"], true);
    assert_eq!(v["fixed_points"], "continuum");

    let v = json(&run(&["props", "eca:170"]));
    assert_eq!(v["surjective"], true);
    assert_eq!(v["injective"], true);
    assert_eq!(v["fixed_points"], "finite:2");

    let v = json(&run(&["props", "eca:110", "--max-k", "2"]));
    assert_eq!(v["surjective"], false);
    assert_eq!(v["cycles"].as_array().unwrap().len(), 1);

    let v = json(&run(&["props", "eca:204", "--exact-cycles", "false", "--max-k", "2"]));
    assert_eq!(v["cycles"][0]["exact"], false);
    assert_eq!(v["cycles"][0]["cardinality"], "continuum");
}

#[test]
fn sweeps() {
    let out = run(&["sweep", "0..255", "surjective", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["summary"]["disagreements"], 0);
    assert_eq!(v["summary"]["rules"], 256);
    let codes: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["rule"].as_u64().unwrap()).collect();
    assert_eq!(codes, (0..256).collect::<Vec<u64>>());

    let v = json(&run(&["sweep", "204..204", "fixed_points"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["value"], "continuum");

    let v = json(&run(&["sweep", "0..3", "injective"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r["rule"], i as u64);
        assert!(r["value"].is_boolean());
    }

    let out = run(&["sweep", "10..20", "injective", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("rule,value"));
    assert_eq!(text.lines().count(), 12);

    let a = run(&["sweep", "0..255", "injective", "--sample", "5", "--seed", "3"]);
    let b = run(&["sweep", "0..255", "injective", "--sample", "5", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["rows"].as_array().unwrap().len(), 5);

    assert_eq!(run(&["sweep", "9..3", "injective"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "0..3", "fixed_points", "--oracle"]).status.code(), Some(2));
}

#[test]
fn finite_support_commands() {
    let out = run(&["reach", "--rule", "eca:170", "\"1\"@0", "\"1\"@-3", "--max-steps", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["steps"], 3);

    let out = run(&["reach", "--rule", "eca:204", "1@0", "11@0", "--max-steps", "5"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["confluence", "--rule", "eca:0", "1@0", "11@7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["steps"], serde_json::json!([1, 1]));

    let out = run(&["confluence", "--rule", "eca:51", "1@0", "1@0"]);
    assert_eq!(out.status.code(), Some(2));
}
