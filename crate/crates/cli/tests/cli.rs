use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const ACYCLIC: &str = r#"{
  "degrees": [0, 1],
  "dims": {"0": 1, "1": 1},
  "d": {"0": [["1"]]},
  "filtration": {"0": {"0": [["1"]], "1": [["1"]]}, "1": {"0": []}, "2": {"1": [["1"]]}}
}"#;

fn ss(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ss"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
    })
}

fn json_err(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("error document on stderr")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn compute_on_the_acyclic_example() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "acyclic.json", ACYCLIC);
    let o = ss(&["compute", "--input", "acyclic.json", "--pages", "4", "--with-maps"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["pages"]["2"], serde_json::json!({"0,0": 1, "2,-1": 1}));
    assert_eq!(v["pages"]["3"], serde_json::json!({}));
    assert_eq!(v["maps"]["2"]["0,0"], serde_json::json!([["1"]]));
    assert_eq!(v["abutment"]["pass"], Value::Bool(true));
}

#[test]
fn oracle_and_decalage_reports_pass() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "acyclic.json", ACYCLIC);
    let o = ss(&["oracle", "--input", "acyclic.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_out(&o)["mismatches"], serde_json::json!([]));
    let o = ss(&["decalage", "--input", "acyclic.json", "--pages", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["pass"], Value::Bool(true));
    assert!(!v["rows"].as_array().unwrap().is_empty());
}

#[test]
fn models_and_ext_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(ss(&["model", "torus", "--n", "2", "--out", "torus2.json"], p).status.code(), Some(0));
    let o = ss(&["ext-dims", "--model", "torus2.json"], p);
    assert_eq!(json_out(&o)["ext_dimensions"], serde_json::json!([1, 4, 6, 4, 1]));
    assert_eq!(ss(&["model", "torus", "--n", "1", "--out", "t1.json"], p).status.code(), Some(0));
    assert_eq!(ss(&["model", "pn", "--n", "1", "--out", "p1.json"], p).status.code(), Some(0));
    assert_eq!(ss(&["model", "product", "--a", "t1.json", "--b", "p1.json", "--out", "prod.json"], p).status.code(), Some(0));
    let o = ss(&["ext-dims", "--model", "prod.json"], p);
    assert_eq!(json_out(&o)["ext_dimensions"], serde_json::json!([1, 2, 2, 2, 1]));
    let o = ss(&["model", "pn", "--n", "3"], p);
    let v = json_out(&o);
    assert_eq!(v["basis"].as_array().unwrap().len(), 4);
    let o = ss(&["ext-dims", "--model", "torus2.json", "--non-degenerate"], p);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(json_err(&o)["error"]["kind"], "unsupported");
}

#[test]
fn certify_reports_the_failing_step() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ss(&["model", "torus", "--n", "2", "--out", "torus2.json"], p);
    write(p, "d.json", r#"{"bidegree": [2, -1], "derivation": {"ξ1": {"η1η2": "1"}}}"#);
    let o = ss(&["certify", "--algebra", "torus2.json", "--derivation", "d.json"], p);
    assert_eq!(o.status.code(), Some(2));
    let v = json_out(&o);
    assert_eq!(v["verdict"]["verdict"], "failed");
    assert_eq!(v["verdict"]["step"], 4);
    let elements = v["verdict"]["witness"]["elements"].as_array().unwrap();
    let alpha = elements.iter().find(|e| e["label"] == "α").unwrap();
    assert_eq!(alpha["rendered"], "ξ1ξ2");

    write(p, "zero.json", r#"{"bidegree": [2, -1], "derivation": {}}"#);
    let o = ss(&["certify", "--algebra", "torus2.json", "--derivation", "zero.json", "--require-square-zero"], p);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["verdict"]["verdict"], "certified");
    assert_eq!(v["steps"][0]["step"], 0);
}

#[test]
fn d2_scales_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ss(&["model", "torus", "--n", "2", "--out", "torus2.json"], p);
    write(p, "alpha.json", r#"{"alpha": {"ξ1": {"η1η2": "1"}}}"#);
    let one = json_out(&ss(&["d2", "--model", "torus2.json", "--alpha", "alpha.json"], p));
    let scaled = json_out(&ss(&["d2", "--model", "torus2.json", "--alpha", "alpha.json", "--scale", "-3/7"], p));
    let images = one["derivation"].as_object().unwrap();
    let mut nonzero = 0;
    for (k, img) in images {
        for (t, c) in img.as_object().unwrap() {
            let c: i64 = c.as_str().unwrap().parse().unwrap();
            let want = match c {
                1 => "-3/7".to_string(),
                -1 => "3/7".to_string(),
                other => panic!("unexpected coefficient {other}"),
            };
            assert_eq!(scaled["derivation"][k][t], Value::String(want));
            nonzero += 1;
        }
    }
    assert!(nonzero > 0);
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write(p, "bad.json", &ACYCLIC.replace(r#""d": {"0": [["1"]]}"#, r#""d": {"0": [["1/0"]]}"#));
    let o = ss(&["compute", "--input", "bad.json"], p);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json_err(&o)["error"]["location"], "bad.json: $.d.0[0][0]");
    write(p, "truncated.json", "{\"degrees\": [0,");
    assert_eq!(ss(&["compute", "--input", "truncated.json"], p).status.code(), Some(3));
    assert_eq!(ss(&["compute", "--input", "missing.json"], p).status.code(), Some(3));
    // d(F^1) escapes F^1
    let unfiltered = r#"{"degrees": [0, 1], "dims": {"0": 1, "1": 1}, "d": {"0": [["1"]]},
        "filtration": {"0": {"0": [["1"]], "1": [["1"]]}, "1": {"0": [["1"]], "1": []}}}"#;
    write(p, "unfiltered.json", unfiltered);
    let o = ss(&["compute", "--input", "unfiltered.json"], p);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(json_err(&o)["error"]["kind"], "invariant");
    assert_eq!(ss(&["no-such-command"], p).status.code(), Some(3));
    assert_eq!(ss(&["--help"], p).status.code(), Some(0));
}

#[test]
fn fuzz_is_clean_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = ss(&["fuzz", "--seed", "7", "--cases", "200"], p);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert!(v["summary"].as_str().unwrap().starts_with("0 counterexamples"));
    let one_thread = Command::new(env!("CARGO_BIN_EXE_ss"))
        .args(["fuzz", "--seed", "7", "--cases", "200"])
        .env("SS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(one_thread.stdout, o.stdout);
}
