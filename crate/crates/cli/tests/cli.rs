//! End-to-end tests of the binary: fixture files in, JSON and exit codes out.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use serde_json::{json, Value};

use bellbound::behaviors::{behavior_from_lhv, behavior_to_json, pr_box, LhvModel};
use bellbound::scenario::{
    document_to_json, CorrelationFunctional, Functional, Scenario, ScenarioDocument,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bellbound"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

fn write_fixture(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn generate_fixture(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let output = bin()
        .args(["generate"])
        .args(args)
        .args(["--output", path.to_str().unwrap()])
        .output()
        .expect("binary runs");
    assert!(output.status.success(), "generate {args:?} failed");
    path
}

#[test]
fn bound_reports_chsh_values() {
    let dir = tempfile::tempdir().unwrap();
    let chsh = generate_fixture(dir.path(), "chsh.json", &["chsh"]);
    let output = run(&["bound", chsh.to_str().unwrap(), "0", "--no-timing"]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    assert_eq!(report["min"], json!(-2.0));
    assert_eq!(report["max"], json!(2.0));
    assert_eq!(report["vertices_scanned"], json!(16));
    assert!(report.get("elapsed_ms").is_none());
}

#[test]
fn bound_includes_timing_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let chsh = generate_fixture(dir.path(), "chsh.json", &["chsh"]);
    let output = run(&["bound", chsh.to_str().unwrap()]);
    let report = stdout_json(&output);
    assert!(report.get("elapsed_ms").is_some());
}

#[test]
fn bound_on_empty_functional_returns_zero() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    let doc = ScenarioDocument {
        scenario: scenario.clone(),
        functionals: vec![Functional::Correlation(
            CorrelationFunctional::new(scenario, []).unwrap(),
        )],
    };
    let path = write_fixture(dir.path(), "empty.json", &document_to_json(&doc));
    let output = run(&["bound", path.to_str().unwrap(), "0", "--no-timing"]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    assert_eq!(report["min"], json!(0.0));
    assert_eq!(report["max"], json!(0.0));
}

#[test]
fn bound_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // malformed file
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(
        run(&["bound", bad.to_str().unwrap()]).status.code(),
        Some(1)
    );
    // functional index out of range
    let chsh = generate_fixture(dir.path(), "chsh.json", &["chsh"]);
    assert_eq!(
        run(&["bound", chsh.to_str().unwrap(), "3"]).status.code(),
        Some(1)
    );
    // cap exceeded
    let mk6 = generate_fixture(dir.path(), "mk6.json", &["mk", "--parties", "6"]);
    let output = run(&["bound", mk6.to_str().unwrap(), "0", "--cap", "100"]);
    assert_eq!(output.status.code(), Some(2));
    // cap override admits the scan
    let output = run(&["bound", mk6.to_str().unwrap(), "0", "--cap", "5000"]);
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn generate_writes_parseable_documents_to_stdout() {
    for args in [
        vec!["chsh"],
        vec!["chsh", "--sign-cell", "3"],
        vec!["ch"],
        vec!["mk", "--parties", "3"],
        vec!["cg4422"],
        vec!["cg2233"],
        vec!["zohren-gill", "--outcomes", "5"],
    ] {
        let output = bin().arg("generate").args(&args).output().unwrap();
        assert_eq!(output.status.code(), Some(0), "generate {args:?}");
        let doc = stdout_json(&output);
        assert!(doc["parties"].is_u64());
        assert!(doc["functionals"].is_array());
    }
}

#[test]
fn generate_exit_codes() {
    assert_eq!(run(&["generate", "nonesuch"]).status.code(), Some(1));
    assert_eq!(run(&["generate", "mk"]).status.code(), Some(1));
    assert_eq!(run(&["generate", "zohren-gill"]).status.code(), Some(1));
    assert_eq!(
        run(&["generate", "chsh", "--sign-cell", "9"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["generate", "zohren-gill", "--outcomes", "1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn generate_with_bound_verifies_published_values() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["chsh", "--with-bound"],
        vec!["mk", "--parties", "4", "--with-bound"],
        vec!["zohren-gill", "--outcomes", "5", "--with-bound"],
        vec!["cg2233", "--with-bound"],
    ] {
        let path = dir.path().join("out.json");
        let output = bin()
            .arg("generate")
            .args(&args)
            .args(["--output", path.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "generate {args:?}");
        let text = std::fs::read_to_string(&path).unwrap();
        let _: Value = serde_json::from_str(&text).unwrap();
    }
}

#[test]
fn generated_bound_roundtrip_matches_published() {
    // bound read back from a generated file equals the published value
    let dir = tempfile::tempdir().unwrap();
    let mk8 = generate_fixture(dir.path(), "mk8.json", &["mk", "--parties", "8"]);
    let output = run(&["bound", mk8.to_str().unwrap(), "0", "--no-timing"]);
    let report = stdout_json(&output);
    assert_eq!(report["max"], json!(128.0));
    assert_eq!(report["min"], json!(-128.0));
}

fn lhv_behavior_fixture(dir: &Path) -> PathBuf {
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    let behavior = behavior_from_lhv(&LhvModel::uniform(scenario).unwrap());
    write_fixture(dir, "lhv.json", &behavior_to_json(&behavior))
}

fn pr_box_fixture(dir: &Path) -> PathBuf {
    write_fixture(dir, "prbox.json", &behavior_to_json(&pr_box()))
}

fn signaling_fixture(dir: &Path) -> PathBuf {
    let mut value = behavior_to_json(&pr_box());
    // disturb one table only: marginals then depend on the partner setting
    let table = value["tables"]["1,1"].as_array_mut().unwrap();
    table[0] = json!(0.4);
    table[3] = json!(0.6);
    write_fixture(dir, "signaling.json", &value)
}

#[test]
fn check_behavior_accepts_lhv_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let path = lhv_behavior_fixture(dir.path());
    let output = run(&["check-behavior", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    assert_eq!(report["no_signaling"]["passed"], json!(true));
    assert_eq!(report["membership"]["verdict"], json!("lhv"));
    let weights = report["membership"]["weights"].as_array().unwrap();
    assert_eq!(weights.len(), 16);
    for entry in report["inequalities"].as_array().unwrap() {
        assert_eq!(entry["satisfied"], json!(true), "{entry}");
    }
}

#[test]
fn check_behavior_flags_pr_box() {
    let dir = tempfile::tempdir().unwrap();
    let path = pr_box_fixture(dir.path());
    let output = run(&["check-behavior", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    assert_eq!(report["membership"]["verdict"], json!("not_lhv"));
    let chsh = report["inequalities"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["name"] == json!("chsh"))
        .expect("chsh entry");
    assert_eq!(chsh["value"], json!(4.0));
    assert_eq!(chsh["satisfied"], json!(false));
    // strict mode turns the verdict into exit 3
    let strict = run(&["check-behavior", path.to_str().unwrap(), "--strict"]);
    assert_eq!(strict.status.code(), Some(3));
}

#[test]
fn check_behavior_skips_membership_for_signaling_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let path = signaling_fixture(dir.path());
    let output = run(&["check-behavior", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    assert_eq!(report["no_signaling"]["passed"], json!(false));
    assert!(!report["no_signaling"]["violations"]
        .as_array()
        .unwrap()
        .is_empty());
    assert_eq!(report["membership"]["verdict"], json!("skipped"));
}

#[test]
fn check_behavior_exits_two_when_strategy_count_exceeds_the_cap() {
    // 12 outcomes per (site, setting): 12^4 = 20736 strategies > 20000
    let dir = tempfile::tempdir().unwrap();
    let values: Vec<f64> = (0..12).map(f64::from).collect();
    let scenario = Arc::new(Scenario::uniform_finite(2, 2, values).unwrap());
    let behavior = behavior_from_lhv(&LhvModel::uniform(scenario).unwrap());
    let path = write_fixture(dir.path(), "wide.json", &behavior_to_json(&behavior));
    let output = run(&["check-behavior", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn check_behavior_rejects_malformed_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "[1, 2, 3]").unwrap();
    assert_eq!(
        run(&["check-behavior", bad.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

fn singlet_quantum_fixture(dir: &Path) -> PathBuf {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [0.0, s, -s, 0.0];
    let re: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|j| psi[i] * psi[j]).collect())
        .collect();
    let zeros4 = vec![vec![0.0; 4]; 4];
    let zeros2 = vec![vec![0.0; 2]; 2];
    let fixture = json!({
        "state": {"dim": 4, "re": re, "im": zeros4},
        "observables": [
            [
                {"dim": 2, "re": [[1.0, 0.0], [0.0, -1.0]], "im": zeros2},
                {"dim": 2, "re": [[0.0, 1.0], [1.0, 0.0]], "im": zeros2}
            ],
            [
                {"dim": 2, "re": [[-s, -s], [-s, s]], "im": zeros2},
                {"dim": 2, "re": [[-s, s], [s, s]], "im": zeros2}
            ]
        ]
    });
    write_fixture(dir, "singlet.json", &fixture)
}

#[test]
fn quantum_eval_reports_singlet_violation() {
    let dir = tempfile::tempdir().unwrap();
    let path = singlet_quantum_fixture(dir.path());
    let output = run(&["quantum-eval", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    assert_eq!(report["verdict"], json!("violates"));
    let value = report["value"].as_f64().unwrap();
    assert!((value - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
    assert_eq!(
        run(&["quantum-eval", path.to_str().unwrap(), "--strict"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn quantum_eval_rejects_non_hermitian_observable() {
    let dir = tempfile::tempdir().unwrap();
    let zeros2 = vec![vec![0.0; 2]; 2];
    let fixture = json!({
        "state": {"dim": 2, "re": [[0.5, 0.0], [0.0, 0.5]], "im": zeros2},
        "observables": [[
            {"dim": 2, "re": [[0.0, 1.0], [0.0, 0.0]], "im": zeros2},
            {"dim": 2, "re": [[1.0, 0.0], [0.0, -1.0]], "im": zeros2}
        ]]
    });
    let path = write_fixture(dir.path(), "skew.json", &fixture);
    assert_eq!(
        run(&["quantum-eval", path.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn lemma1_audit_passes_on_chsh_and_rejects_probability_functionals() {
    let dir = tempfile::tempdir().unwrap();
    let chsh = generate_fixture(dir.path(), "chsh.json", &["chsh"]);
    let output = run(&[
        "lemma1-audit",
        chsh.to_str().unwrap(),
        "--samples",
        "5000",
        "--seed",
        "7",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    assert_eq!(report["escapes"].as_array().unwrap().len(), 0);
    assert!(report["lower_margin"].as_f64().unwrap() >= 0.0);
    // a probability functional is not auditable
    let ch = generate_fixture(dir.path(), "ch.json", &["ch"]);
    assert_eq!(
        run(&["lemma1-audit", ch.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn lemma1_audit_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let mk3 = generate_fixture(dir.path(), "mk3.json", &["mk", "--parties", "3"]);
    let args = [
        "lemma1-audit",
        mk3.to_str().unwrap(),
        "--samples",
        "2000",
        "--seed",
        "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_flag_mirrors_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let chsh = generate_fixture(dir.path(), "chsh.json", &["chsh"]);
    let copy = dir.path().join("report.json");
    let output = run(&[
        "bound",
        chsh.to_str().unwrap(),
        "0",
        "--no-timing",
        "--output",
        copy.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let written = std::fs::read(&copy).unwrap();
    assert_eq!(written, output.stdout);
}
