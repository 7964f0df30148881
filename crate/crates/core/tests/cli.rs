use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn amice(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_amice"))
        .args(args)
        .env_remove("AMICE_DEFAULT_PREC")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    let mut pipe = child.stdin.take().expect("stdin");
    pipe.write_all(stdin.unwrap_or_default()).expect("write stdin");
    drop(pipe);
    child.wait_with_output().expect("output")
}

fn parse(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

const FAMILY: &str = r#"{"prime":3,"a0":"2","neg_bound":6,"pos_bound":9,
  "entries":[{"n":1,"witt":{"components":["1","2"]}},{"n":-1,"witt":{"components":["3","9"]}},{"n":-2,"witt":{"components":["9"]}}]}"#;

#[test]
fn generated_operators_check_out() {
    for kind in ["diff", "qdiff"] {
        let gen = amice(&["--p", "3", "--prec", "20", "solvable", "generate", "--family", FAMILY, "--kind", kind, "--q", "10"], None);
        assert_eq!(gen.status.code(), Some(0), "{}", String::from_utf8_lossy(&gen.stdout));
        let chk = amice(&["--p", "3", "--prec", "20", "solvable", "check"], Some(&gen.stdout));
        assert_eq!(chk.status.code(), Some(0));
        assert_eq!(parse(&chk)["result"]["verdict"]["label"], json!("PASS-on-window"));
    }
}

#[test]
fn non_integral_operator_fails_with_witness() {
    let op = r#"{"kind":"diff","series":{"prime":2,"coeffs":[[1,"1/2"]],"norm_faithful":true}}"#;
    let out = amice(&["--p", "2", "solvable", "check", "--in", op], None);
    assert_eq!(out.status.code(), Some(1));
    let v = parse(&out);
    assert_eq!(v["result"]["verdict"]["label"], json!("FAIL"));
    assert_eq!(v["result"]["verdict"]["witness"], json!({"n": 1, "m": 0, "test": "integrality"}));
}

#[test]
fn motzkin_pipeline_reproduces_the_unit() {
    let a = r#"{"prime":2,"coeffs":[[0,"2"],[1,"1"]],"norm_faithful":true}"#;
    let dec = amice(&["--p", "2", "motzkin", "decompose", "--in", a], None);
    assert_eq!(dec.status.code(), Some(0));
    assert_eq!(parse(&dec)["result"]["N"], json!(1));
    let rec = amice(&["--p", "2", "motzkin", "recompose"], Some(&dec.stdout));
    assert_eq!(rec.status.code(), Some(0));
    let coeffs = &parse(&rec)["result"]["coeffs"];
    let terms: Vec<(i64, Value)> =
        coeffs.as_array().unwrap().iter().map(|t| (t[0].as_i64().unwrap(), t[1].clone())).filter(|(_, c)| c["v"] != Value::Null).collect();
    assert_eq!(terms.len(), 2);
    assert_eq!(terms[0].0, 0);
    assert_eq!(terms[0].1["v"], json!(1));
    assert_eq!(terms[1].0, 1);
    assert_eq!(terms[1].1["v"], json!(0));
}

#[test]
fn lemma_run_reports_no_counterexamples() {
    let out = amice(&["--p", "2", "--kmax", "40", "lemmas", "run", "--which", "L3_0_10", "--n", "3"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = parse(&out);
    assert_eq!(v["result"]["counterexamples"], json!(0));
    assert_eq!(v["version"], json!("amice 0.1.0"));
    assert_eq!(v["config"]["kmax"], json!(40));
}

#[test]
fn runs_are_byte_identical() {
    let args = ["--p", "5", "lemmas", "run", "--which", "L5_3_3", "--samples", "50", "--seed", "7"];
    let a = amice(&args, None);
    let b = amice(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = [
        "--p",
        "3",
        "radius",
        "--rho",
        "0",
        "--in",
        r#"{"kind":"diff","series":{"prime":3,"coeffs":[[-1,"1/9"],[0,"1"]],"norm_faithful":true}}"#,
    ];
    assert_eq!(amice(&r, None).stdout, amice(&r, None).stdout);
}

#[test]
fn errors_carry_the_envelope() {
    let out = amice(&["--p", "4", "padic", "show", "--x", "1"], None);
    assert_eq!(out.status.code(), Some(64));
    let out = amice(&["--p", "2", "witt", "ghost", "--in", "[1,"], None);
    assert_eq!(out.status.code(), Some(65));
    let v = parse(&out);
    assert_eq!(v["version"], json!("amice 0.1.0"));
    assert_eq!(v["config"]["p"], json!(2));
    assert_eq!(v["error"]["kind"], json!("Parse"));
}

#[test]
fn environment_precision_is_a_default() {
    let run = |env: Option<&str>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_amice"));
        c.args(args).stdin(Stdio::null());
        match env {
            Some(e) => c.env("AMICE_DEFAULT_PREC", e),
            None => c.env_remove("AMICE_DEFAULT_PREC"),
        };
        serde_json::from_slice::<Value>(&c.output().unwrap().stdout).unwrap()
    };
    assert_eq!(run(Some("11"), &["padic", "show", "--x", "3"])["config"]["prec"], json!(11));
    assert_eq!(run(Some("11"), &["--prec", "6", "padic", "show", "--x", "3"])["config"]["prec"], json!(6));
}
