use std::io::Write;
use std::path::Path;
use std::process::Command;

use projconst::cli::SubspaceDocument;
use serde_json::Value;
use tempfile::NamedTempFile;

fn doc(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_projconst"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn run_json(args: &[&str]) -> (i32, Value, String) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let (code, text) = run(&full);
    let value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (code, value, text)
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

const KER3: &str = r#"{"ambient_dim": 3, "basis": [["1", "-1", "0"], ["0", "1", "-1"]]}"#;

#[test]
fn minproj_report() {
    let f = doc(KER3);
    let (code, v, _) = run_json(&["minproj", path(&f), "--oracle"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["outputs"]["lambda"], "4/3");
    assert_eq!(v["outputs"]["attained"], true);
    assert_eq!(v["outputs"]["oracle"]["agrees"], true);
    assert_eq!(v["inputs_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let f = doc(KER3);
    let a = run_json(&["zerosum", path(&f), "--copies", "2"]).2;
    let b = run_json(&["zerosum", path(&f), "--copies", "2"]).2;
    assert_eq!(a, b);
}

#[test]
fn emitted_subspaces_reparse() {
    let f = doc(r#"{"ambient_dim": 2, "basis": [[1, 1]]}"#);
    let (code, v, _) = run_json(&["zerosum", path(&f), "--copies", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["sigma_lambda"], "4/3");
    let emitted = serde_json::to_string(&v["outputs"]["subspace"]).unwrap();
    let reparsed = SubspaceDocument::parse(&emitted).unwrap();
    let again = SubspaceDocument::from_subspace(&reparsed.to_subspace().unwrap());
    assert_eq!(reparsed, again);

    let g = doc(&emitted);
    let (code, v, _) = run_json(&["minproj", path(&g)]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["lambda"], "4/3");
}

#[test]
fn exit_codes() {
    let ragged = doc(r#"{"ambient_dim": 3, "basis": [["1", "1"]]}"#);
    let dependent = doc(r#"{"ambient_dim": 2, "basis": [["1", "2"], ["-2", "-4"]]}"#);
    let big = doc(r#"{"ambient_dim": 13, "basis": [[1,0,0,0,0,0,0,0,0,0,0,0,0]]}"#);
    let ker3 = doc(KER3);
    let missing = Path::new("/nonexistent/subspace.json").to_str().unwrap();
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["minproj", path(&ragged)], 2),
        (vec!["minproj", missing], 2),
        (vec!["minproj", path(&dependent)], 3),
        (vec!["minproj", path(&big)], 5),
        (vec!["--budget", "2", "minproj", path(&ker3)], 5),
        (vec!["zerosum", path(&ker3), "--copies", "7"], 2),
        (
            vec![
                "plan",
                "--lambda",
                "2",
                "--copies",
                "3",
                "--demo",
                path(&ker3),
            ],
            6,
        ),
        (vec!["plan", "--lambda", "0"], 2),
        (vec!["bm", "--model", "1"], 7),
        (vec!["bm", "--params", "-2"], 2),
    ];
    for (args, expected) in cases {
        let (code, v, _) = run_json(&args);
        assert_eq!(code, expected, "{args:?}: {v}");
        assert_eq!(v["status"], "error", "{args:?}");
    }
    assert_eq!(run(&["bm"]).0, 2);
    assert_eq!(run(&["--budget", "x", "bm", "--optimize"]).0, 2);
}

#[test]
fn plan_and_demo() {
    let (code, v, _) = run_json(&["plan", "--lambda", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["plan"]["alpha"], "125/64");
    assert_eq!(v["outputs"]["plan"]["N"], 5);

    let (_, v, _) = run_json(&["plan", "--lambda", "3/2"]);
    assert_eq!(v["outputs"]["plan"]["m"], 0);
    assert_eq!(v["outputs"]["plan"]["N"], Value::Null);

    let f = doc(KER3);
    let (code, v, _) = run_json(&[
        "plan",
        "--lambda",
        "16/9",
        "--copies",
        "3",
        "--demo",
        path(&f),
        "--steps",
        "1",
    ]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["outputs"]["demo"]["steps"][0]["certified"], "16/9");
}

#[test]
fn bm_modes() {
    let (code, v, _) = run_json(&["bm", "--optimize"]);
    assert_eq!(code, 0);
    let a = v["outputs"]["a_star"].as_f64().unwrap();
    assert!((a - (1.0 + 3f64.sqrt())).abs() <= 1e-8);

    let (code, v, _) = run_json(&["bm", "--model", "4", "--window", "256", "--basis", "32"]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["K"], "9/2");
    assert_eq!(v["outputs"]["within_bound"], true);

    let (code, v, _) = run_json(&["bm", "--params", "2.5"]);
    assert_eq!(code, 0);
    assert!(v["outputs"].get("exact").is_none());
}

#[test]
fn human_output_and_timing() {
    let (code, text) = run(&["bm", "--params", "4"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("bm [ok]\n"));
    assert!(text.contains("\nK: 4.5\n"));
    let (_, v, _) = run_json(&["--timing", "bm", "--params", "4"]);
    assert!(v["wall_time_ms"].is_u64());
}

#[test]
fn selftest_fault_injection() {
    let (code, v, _) = run_json(&["selftest", "--inject-fault"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "error");
    assert_eq!(v["outputs"]["failed"], serde_json::json!(["centring-norm"]));
}
