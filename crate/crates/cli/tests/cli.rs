use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use umebh_cli::MatrixFile;

fn umebh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_umebh")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("stdout is not a report ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn clause<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["clauses"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no clause {name}"))
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path]);
    let o = umebh(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn catalog_round_trips_and_verifies() {
    let dir = TempDir::new().unwrap();
    let cases: [(&str, &[&str]); 7] = [
        ("fourier.json", &["fourier", "--d", "4"]),
        ("prop2.json", &["prop2", "--n", "1"]),
        ("example5b.json", &["example5b"]),
        ("example7a.json", &["example7a"]),
        ("s0.json", &["s0", "--d", "3"]),
        ("umeb5.json", &["umeb", "--d", "5"]),
        ("umeb7.json", &["umeb", "--d", "7"]),
    ];
    for (name, args) in cases {
        let path = generate(dir.path(), name, args);
        let text = fs::read_to_string(&path).unwrap();
        let parsed = MatrixFile::parse(&text).unwrap();
        assert_eq!(parsed.to_json(), text, "{name} does not re-serialize identically");
        let o = umebh(&["verify", &path]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stdout));
        assert_eq!(report(&o)["passed"], true);
    }
}

#[test]
fn generated_shapes() {
    let o = umebh(&["generate", "prop2", "--n", "1"]);
    let f = MatrixFile::parse(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!((f.rows.as_ref().unwrap().len(), f.d), (2, 5));
    let o = umebh(&["generate", "umeb", "--d", "5"]);
    let f = MatrixFile::parse(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(f.members.as_ref().unwrap().len(), 23);
    assert_eq!(f.metadata["labels"].as_array().unwrap().len(), 23);
    let o = umebh(&["generate", "fourier", "--d", "4"]);
    let f = MatrixFile::parse(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(f.rows.as_ref().unwrap().len(), 4);
}

#[test]
fn umeb7_report_numbers() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "u7.json", &["umeb", "--d", "7"]);
    let r = report(&umebh(&["verify", &path]));
    assert_eq!(r["details"]["members"], 45);
    assert!(clause(&r, "trace_orthogonal")["worst_deviation"].as_f64().unwrap() < 1e-9);
    assert_eq!(r["seed"], 0);
    assert_eq!(r["tolerances"]["eps_orth"], 1e-9);
    assert!(r["command"].as_array().unwrap().iter().any(|a| a == "verify"));
}

#[test]
fn perturbed_entry_fails_and_names_the_clause() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "f.json", &["fourier", "--d", "4"]);
    let mut f = MatrixFile::parse(&fs::read_to_string(&path).unwrap()).unwrap();
    f.rows.as_mut().unwrap()[2][1][0] += 1e-3;
    fs::write(&path, f.to_json()).unwrap();
    let o = umebh(&["verify", &path]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    assert_eq!(r["passed"], false);
    assert_eq!(clause(&r, "unimodular")["passed"], false);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unimodular"));
}

#[test]
fn malformed_input_exits_2_with_location() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"schema_version":"1","kind":"partial_hadamard","d":2,"rows":[[[1,0],[1,0]],[[1,0],[1]]]}"#).unwrap();
    let o = umebh(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("rows[1][1]"));

    let o = umebh(&["verify", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let o = umebh(&["generate", "hadamard"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("fourier"));
    let o = umebh(&["generate", "umeb", "--d", "6"]);
    assert_eq!(code(&o), 2);
    let o = umebh(&["classify", "1"]);
    assert_eq!(code(&o), 2);
    let o = umebh(&["--tol-success", "1", "classify", "5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn oversized_generation_exits_3() {
    let o = umebh(&["generate", "s0", "--d", "100"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn required_oracle_over_budget_exits_3() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "p2.json", &["prop2", "--n", "2"]);
    let o = umebh(&["--starts", "50", "search", &path, "--require-oracle"]);
    assert_eq!(code(&o), 3);
    assert!(report(&o)["details"]["grid_oracle"]["skipped"].is_string());
}

#[test]
fn complete_fourier_minus_last_row() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "f6.json", &["fourier", "--d", "6"]);
    let mut f = MatrixFile::parse(&fs::read_to_string(&path).unwrap()).unwrap();
    f.rows.as_mut().unwrap().pop();
    fs::write(&path, f.to_json()).unwrap();
    let out = dir.path().join("full.json");
    let o = umebh(&["complete", &path, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert!(clause(&r, "appended_row_unimodular")["worst_deviation"].as_f64().unwrap() < 1e-9);
    let full = MatrixFile::parse(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(full.rows.as_ref().unwrap().len(), 6);
    assert_eq!(code(&umebh(&["verify", out.to_str().unwrap()])), 0);
}

#[test]
fn complete_rejects_wrong_row_count() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "p.json", &["prop2", "--n", "1"]);
    let o = umebh(&["complete", &path]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("search"));
}

#[test]
fn search_prop2_stalls_with_certificate() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "p1.json", &["prop2", "--n", "1"]);
    let out = dir.path().join("ext.json");
    let o = umebh(&["--starts", "200", "search", &path, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["details"]["rows_after_extension"], 3);
    assert_eq!(clause(&r, "parity_certificate")["passed"], true);
    assert_eq!(clause(&r, "forced_constraints_hold")["passed"], true);
    assert_eq!(r["evidence_tier"], "heuristic");
    let ext = MatrixFile::parse(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(ext.rows.as_ref().unwrap().len(), 3);
    let o = umebh(&["verify", out.to_str().unwrap(), "--unextendible"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn search_fourier_subset_completes() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "f5.json", &["fourier", "--d", "5"]);
    let mut f = MatrixFile::parse(&fs::read_to_string(&path).unwrap()).unwrap();
    f.rows.as_mut().unwrap().truncate(3);
    fs::write(&path, f.to_json()).unwrap();
    let o = umebh(&["--starts", "64", "search", &path]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["details"]["rows_after_extension"], 5);
    // a completable input is not unextendible
    let o = umebh(&["--starts", "64", "verify", &path, "--unextendible"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn search_example7_reports_certificate_and_extension() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "a7.json", &["example7a"]);
    let o = umebh(&["--starts", "100", "search", &path]);
    let r = report(&o);
    assert_eq!(clause(&r, "printed_quadratics_inconsistent")["passed"], true);
    assert!(r["details"]["rows_added"].as_u64().unwrap() >= 1);
    let printed = r["details"]["printed_basis_check"].as_array().unwrap();
    assert_eq!(printed[3]["consistent"], false);
}

#[test]
fn verify_prop2_n2_unextendible() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "p2.json", &["prop2", "--n", "2"]);
    let o = umebh(&["--starts", "200", "verify", &path, "--unextendible"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(&o);
    assert_eq!(r["evidence_tier"], "heuristic");
    assert!(clause(&r, "unextendible")["detail"].as_str().unwrap().contains("UMEB-certified"));
}

#[test]
fn classify_examples() {
    let r = report(&umebh(&["classify", "22"]));
    assert_eq!(r["details"]["status"], "unknown");
    let r = report(&umebh(&["classify", "2"]));
    assert_eq!(r["details"]["status"], "not_exists");
    let r = report(&umebh(&["classify", "105"]));
    assert_eq!(r["details"]["status"], "exists");
    assert_eq!(r["details"]["route"], "divisor-4n+1(5)");
    assert_eq!(r["details"]["lift_constructions"].as_array().unwrap().len(), 3);
    assert_eq!(r["details"]["deficiencies_pairwise_distinct"]["discussion_paragraph"], true);
    let r = report(&umebh(&["classify", "7"]));
    assert_eq!(r["details"]["witness_command"], "umebh generate umeb --d 7");
}

#[test]
fn reports_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let path = generate(dir.path(), "p1.json", &["prop2", "--n", "1"]);
    let run = || {
        let mut r = report(&umebh(&["--seed", "5", "--starts", "100", "search", &path]));
        r["wall_time_s"] = Value::Null;
        r
    };
    assert_eq!(run(), run());
}
