use std::io::Write;
use std::process::{Command, Output, Stdio};

fn nhk(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_nhk"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn nhk");
    child.stdin.take().unwrap().write_all(stdin.unwrap_or_default()).unwrap();
    child.wait_with_output().unwrap()
}

fn pipe(first: &[&str], second: &[&str]) -> Output {
    let doc = nhk(first, None);
    assert_eq!(doc.status.code(), Some(0), "{}", String::from_utf8_lossy(&doc.stderr));
    nhk(second, Some(&doc.stdout))
}

fn example(name: &str) -> String {
    format!("{}/examples/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

#[test]
fn sra_pbw_passes() {
    let out = pipe(&["gallery", "sra", "--group", "z2", "--t", "1", "--c", "1"], &["pbw", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verdict"], "pass");
    for k in ["1", "2", "3"] {
        assert_eq!(r["results"]["conditions"][k], true);
    }
}

#[test]
fn weyl_dualize_reports_zero_differential() {
    let out = nhk(&["dualize", &example("weyl.json")], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("d = 0"), "{text}");
    let r = json(&nhk(&["--json", "dualize", &example("weyl.json")], None));
    assert_eq!(r["results"]["curvature"], serde_json::json!(["-1"]));
}

#[test]
fn reports_are_deterministic() {
    let a = nhk(&["--json", "hochschild", "--cutoff", "3", &example("weyl.json")], None);
    let b = nhk(&["--json", "hochschild", "--cutoff", "3", &example("weyl.json")], None);
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(r["cutoffs"]["window"], 3);
    assert!(r["input_digest"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn sl2_ext_of_trivial_module() {
    let k = example("sl2-trivial.json");
    let out = nhk(&["--json", "ext", &example("sl2.json"), "--source", &k, "--target", &k], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["dims"], serde_json::json!([1, 0, 0, 1]));
}

#[test]
fn verify_commands_pass_on_trivial_module() {
    for check in ["counit", "s-vs-f"] {
        let out = nhk(&["verify", check, &example("sl2.json"), "--module", &example("sl2-trivial.json")], None);
        assert_eq!(out.status.code(), Some(0), "{check}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn failing_verdict_exits_one() {
    // x^2 = y: the cubic overlap produces xy - yx outside the quadratic part.
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(example("weyl.json")).unwrap()).unwrap();
    doc["relations"] = serde_json::json!([["0", "0", "-1", "1", "0", "0", "0"]]);
    let out = nhk(&["--json", "pbw"], Some(doc.to_string().as_bytes()));
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["verdict"], "fail");
    assert_eq!(r["results"]["witness"]["residual"], serde_json::json!(["0", "1", "-1", "0"]));
}

#[test]
fn module_for_wrong_algebra_is_invalid() {
    let out = nhk(&["resolve", &example("weyl.json"), "--module", &example("sl2-trivial.json")], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_input_exits_two() {
    let out = nhk(&["pbw"], Some(b"{ not json"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("syntax error"));
    let out = nhk(&["gallery", "weyl", "--dim", "3"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn file_input_matches_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sym.json");
    let doc = nhk(&["gallery", "sym", "--n", "2"], None);
    std::fs::write(&path, &doc.stdout).unwrap();
    let a = nhk(&["--json", "koszul", path.to_str().unwrap()], None);
    let b = nhk(&["--json", "koszul", "-"], Some(&doc.stdout));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
}

#[test]
fn bit_cap_fails_loudly() {
    let doc = nhk(&["gallery", "sra", "--t", "1/3", "--c", "5/7"], None);
    let out = Command::new(env!("CARGO_BIN_EXE_nhk"))
        .args(["dualize", "-"])
        .env("NHK_MAX_BITS", "2")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .and_then(|mut c| {
            c.stdin.take().unwrap().write_all(&doc.stdout)?;
            c.wait_with_output()
        })
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bit-size cap"));
}
