use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    root.to_str().expect("utf-8 path").to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kernelpoly")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf-8"),
        String::from_utf8(out.stderr).expect("utf-8"),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let (code, out, err) = run(&all);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}")))
}

fn temp(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("kernelpoly-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join(name);
    std::fs::write(&path, contents).expect("write temp file");
    path.to_str().expect("utf-8 path").to_string()
}

#[test]
fn fk_vertices_of_the_counterexample() {
    let (code, v) = json(&["fk-vertices", &fixture("sec5.dg")]);
    assert_eq!(code, 0);
    let got: Vec<Vec<&str>> = v["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| ["1", "2", "3", "4"].iter().map(|k| p[k].as_str().unwrap()).collect())
        .collect();
    assert_eq!(got, vec![vec!["1", "0", "0", "1"], vec!["1/2", "1/2", "0", "1/2"], vec!["0", "1", "1", "0"]]);
}

#[test]
fn kernel_of_a_directed_triangle_is_none() {
    let (code, out, _) = run(&["kernel", &fixture("c3.dg")]);
    assert_eq!(code, 1);
    assert!(out.starts_with("none\n"));
    let (code, out, _) = run(&["kernel", &fixture("sec5.dg")]);
    assert_eq!(code, 0);
    assert_eq!(out, "1 4\n");
}

#[test]
fn verify_the_star() {
    let (code, out, _) = run(&["verify", &fixture("k13.mg"), "--cbound", "2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("violations: 0"));
}

#[test]
fn output_is_deterministic() {
    let a = run(&["verify", &fixture("parpair.mg"), "--json"]);
    let b = run(&["verify", &fixture("parpair.mg"), "--json"]);
    assert_eq!(a, b);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["good", &fixture("sec5.dg")]).0, 0);
    assert_eq!(run(&["good", &fixture("c5.dg")]).0, 1);
    assert_eq!(run(&["good", "/nonexistent/file.dg"]).0, 2);
    assert_eq!(run(&["no-such-command"]).0, 2);
    assert_eq!(run(&["good", &fixture("k13.mg")]).0, 2);
    assert_eq!(run(&["fk-vertices", &fixture("sec5.dg"), "--budget", "1"]).0, 3);
}

#[test]
fn integrality_and_tdi_of_the_counterexample() {
    let (code, v) = json(&["integral", &fixture("sec5.dg"), "--k", "1"]);
    assert_eq!(code, 1);
    assert_eq!(v["certificate"]["kind"], "non_integral");
    assert_eq!(json(&["integral", &fixture("sec5.dg"), "--k", "2"]).0, 0);
    let (code, v) = json(&["tdi", &fixture("sec5.dg"), "--k", "1", "--cbound", "2"]);
    assert_eq!(code, 1);
    assert_eq!(v["certificate"]["kind"], "tdi_failure");
    assert_eq!(json(&["tdi", &fixture("sec5.dg"), "--k", "2", "--cbound", "2"]).0, 0);
}

#[test]
fn certificates_round_trip() {
    let cases: [(&[&str], &[String]); 5] = [
        (&["kernel"], &[fixture("c3.dg")]),
        (&["good"], &[fixture("c5.dg")]),
        (&["kernel-perfect"], &[fixture("c5.dg")]),
        (&["integral"], &[fixture("sec5.dg")]),
        (&["tdi"], &[fixture("sec5.dg")]),
    ];
    for (cmd, inputs) in cases {
        let mut args: Vec<&str> = cmd.to_vec();
        args.extend(inputs.iter().map(String::as_str));
        args.push("--json");
        let (code, out, _) = run(&args);
        assert_eq!(code, 1, "{args:?}");
        let cert = temp(&format!("{}.json", cmd[0]), &out);
        let mut check = vec!["check-certificate", cert.as_str()];
        check.extend(inputs.iter().map(String::as_str));
        assert_eq!(run(&check).0, 0, "{args:?}");
    }
}

#[test]
fn forged_certificates_are_rejected() {
    let cert = temp("forged-kernel.json", r#"{"kind":"no_kernel"}"#);
    assert_eq!(run(&["check-certificate", &cert, &fixture("sec5.dg")]).0, 1);
    let cert = temp("forged-vertex.json", r#"{"kind":"non_integral","k":1,"point":{"1":"1/2","2":"1/2","3":"1/2","4":"1/2"}}"#);
    assert_eq!(run(&["check-certificate", &cert, &fixture("sec5.dg")]).0, 1);
    let cert = temp("forged-free.json", r#"{"kind":"kernel_free","subset":["1","2"]}"#);
    assert_eq!(run(&["check-certificate", &cert, &fixture("sec5.dg")]).0, 1);
}

#[test]
fn line_graph_of_a_parallel_pair() {
    let (code, v) = json(&["linegraph", &fixture("parpair.mg")]);
    assert_eq!(code, 0);
    assert_eq!(v["edges"].as_array().unwrap().len(), 2);
    assert_eq!(v["edges"][0]["label"], "u");
    assert_eq!(v["edges"][1]["label"], "v");
}

#[test]
fn prefs_and_digraph_conversions() {
    let (code, digraph, _) = run(&["to-digraph", &fixture("c4cyclic.pref")]);
    assert_eq!(code, 0);
    let d = temp("c4.dg", &digraph);
    let (code, prefs, _) = run(&["to-prefs", &fixture("c4cyclic.pref"), &d]);
    assert_eq!(code, 0);
    assert!(prefs.contains("p v1 : e41 e12"));
    let cyclic = temp("cyclic.dg", "v a\nv b\nv d\na x a b c\na y b d c\na z d a c\n");
    let (code, out, _) = run(&["to-prefs", &fixture("k13.mg"), &cyclic, "--json"]);
    assert_eq!(code, 1);
    let cert = temp("cyclic-cert.json", &out);
    assert_eq!(run(&["check-certificate", &cert, &fixture("k13.mg"), &cyclic]).0, 0);
}

#[test]
fn expand_lift_and_round() {
    let (code, out, _) = run(&["expand", &fixture("parpair.pref")]);
    assert_eq!(code, 0);
    assert!(out.contains("e e1/u.u0 u e1/u0"));
    let x = temp("pp.json", r#"{"e1": "1/3", "e2": "2/3"}"#);
    let (code, v) = json(&["lift", &fixture("parpair.pref"), &x]);
    assert_eq!(code, 0);
    assert_eq!(v["in_expanded_fsm"], true);
    assert_eq!(v["projection_identity"], true);
    let outside = temp("out.json", r#"{"e1": "1/4", "e2": "1/4"}"#);
    let (code, out, _) = run(&["lift", &fixture("parpair.pref"), &outside, "--json"]);
    assert_eq!(code, 1);
    let cert = temp("out-cert.json", &out);
    assert_eq!(run(&["check-certificate", &cert, &fixture("parpair.pref")]).0, 0);
    let (code, v) = json(&["round", &fixture("c4cyclic.pref"), &fixture("c4half.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["stable"], true);
}

#[test]
fn fm_eliminates_and_warns() {
    let sys = r#"{"variables":["x","y"],"rows":[
        {"label":"a","coeffs":{"x":"1","y":"1"},"rel":">=","rhs":"1"},
        {"label":"b","coeffs":{"x":"2","y":"-1"},"rel":"<=","rhs":"2"},
        {"label":"c","coeffs":{"y":"1"},"rel":"<=","rhs":"1"}]}"#;
    let path = temp("sys.json", sys);
    let (code, out, err) = run(&["fm", &path, "--order", "x"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("y"));
    assert!(err.contains("warning"));
}
