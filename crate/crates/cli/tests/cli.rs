//! End-to-end tests of the `persym` binary: JSON output, CSV export, the
//! exit-code contract and report round-tripping.

use persym_core::engine::full_census;
use serde_json::Value;
use std::process::{Command, Output};

fn persym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_persym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

fn stdout_json(out: &Output) -> Value {
    let text = String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8");
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {text}"))
}

fn run_ok(args: &[&str]) -> Value {
    let out = persym(args);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout_json(&out)
}

#[test]
fn census_reports_histogram_and_shard_metadata() {
    let rep = run_ok(&["census", "--n", "2", "--k", "3"]);
    assert_eq!(rep["command"], "census");
    assert_eq!(rep["params"]["n"], 2);
    assert_eq!(rep["params"]["k"], 3);

    let expect = full_census(2, 3).unwrap();
    let gamma: Vec<String> = expect.gamma.iter().map(|g| g.to_string()).collect();
    let got: Vec<String> = rep["gamma"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(got, gamma);
    assert_eq!(rep["shards"]["count"], 1);
    assert_eq!(rep["shards"]["index"], 0);
    assert_eq!(rep["shards"]["tuples_scanned"], "256");
}

#[test]
fn census_shard_covers_only_its_range() {
    let rep = run_ok(&[
        "census",
        "--n",
        "2",
        "--k",
        "3",
        "--shards",
        "4",
        "--shard-index",
        "1",
    ]);
    assert_eq!(rep["shards"]["count"], 4);
    assert_eq!(rep["shards"]["index"], 1);
    assert_eq!(rep["shards"]["tuples_scanned"], "64");
}

#[test]
fn census_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gamma.csv");
    run_ok(&[
        "census",
        "--n",
        "1",
        "--k",
        "2",
        "--csv",
        path.to_str().unwrap(),
    ]);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv, "i,gamma\n0,1\n1,3\n2,4\n");
}

#[test]
fn census_budget_refusal_exits_3() {
    let out = persym(&["census", "--n", "3", "--k", "9", "--budget-log2", "20"]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("budget"), "stderr: {err}");
}

#[test]
fn formula_evaluates_with_provenance() {
    // Rank 6 with two blocks is impossible, so the closed form must say 0.
    let rep = run_ok(&["formula", "--i", "6", "--n", "2", "--k", "9"]);
    assert_eq!(rep["value"], "0");
    assert!(
        rep["source"].as_str().unwrap().contains("cross-checked"),
        "source: {}",
        rep["source"]
    );
}

#[test]
fn formula_coverage_gap_exits_2() {
    let out = persym(&["formula", "--i", "7", "--n", "4", "--k", "10"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("rank 7"), "stderr: {err}");
}

#[test]
fn verify_passes_small_space() {
    let rep = run_ok(&["verify", "--n", "1", "--k", "2"]);
    assert_eq!(rep["outcome"], "passed");
    let checks = rep["checks"].as_array().unwrap();
    assert!(checks.len() >= 7);
    assert!(checks.iter().all(|c| c["ok"] == true));
}

#[test]
fn verify_round_trips_a_saved_census_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("census.json");
    run_ok(&[
        "census",
        "--n",
        "1",
        "--k",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);

    let direct = run_ok(&["verify", "--n", "1", "--k", "3"]);
    let reread = run_ok(&["verify", "--from", path.to_str().unwrap()]);
    assert_eq!(reread["outcome"], "passed");
    // Same checks, same verdicts, whether the census is fresh or re-read.
    assert_eq!(direct["checks"], reread["checks"]);
    assert_eq!(direct["gamma"], reread["gamma"]);
}

#[test]
fn verify_rejects_tampered_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("census.json");
    run_ok(&[
        "census",
        "--n",
        "1",
        "--k",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    let mut rep: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let g0: u64 = rep["gamma"][0].as_str().unwrap().parse().unwrap();
    rep["gamma"][0] = Value::String((g0 + 1).to_string());
    std::fs::write(&path, serde_json::to_string_pretty(&rep).unwrap()).unwrap();

    let out = persym(&["verify", "--from", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "a doctored histogram must fail verification");
    let rep = stdout_json(&out);
    assert_eq!(rep["outcome"], "mismatch");
}

#[test]
fn rqnk_kernel_reproduces_worked_example() {
    let rep = run_ok(&[
        "rqnk", "--q", "3", "--n", "1", "--k", "9", "--method", "kernel",
    ]);
    assert_eq!(rep["value"], "145227776");
}

#[test]
fn rqnk_methods_agree() {
    let mut values = Vec::new();
    for method in ["formula", "census", "kernel", "naive"] {
        let rep = run_ok(&[
            "rqnk", "--q", "2", "--n", "2", "--k", "3", "--method", method,
        ]);
        values.push(rep["value"].as_str().unwrap().to_string());
    }
    assert!(
        values.iter().all(|v| v == &values[0]),
        "methods disagree: {values:?}"
    );
}

#[test]
fn rqnk_naive_budget_refusal_exits_3() {
    let out = persym(&[
        "rqnk", "--q", "3", "--n", "8", "--k", "5", "--method", "naive",
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("2^63"));
}

#[test]
fn fit_moments_reports_unique_solution() {
    let rep = run_ok(&["fit", "moments"]);
    assert_eq!(rep["outcome"], "unique");
    assert_eq!(rep["system"]["rows"], 33);
    assert_eq!(rep["system"]["cols"], 24);
    assert_eq!(rep["system"]["rank"], 24);

    // The recovered cubic coefficient of the rank-8 row, sign and all.
    let solved = rep["solved"].as_array().unwrap();
    let c83 = solved
        .iter()
        .find(|c| c["rank"] == 8 && c["exponent"] == 3)
        .expect("rank-8 cubic coefficient present");
    assert_eq!(c83["value"], "-57511680");
    assert_eq!(rep["polynomials"].as_array().unwrap().len(), 10);
}

#[test]
fn fit_moments_rejects_other_k() {
    let out = persym(&["fit", "moments", "--k", "8"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn fit_samples_recovers_rank6_polynomial() {
    let rep = run_ok(&[
        "fit",
        "samples",
        "--i",
        "6",
        "--k",
        "7",
        "--max-n",
        "5",
        "--roots",
        "1,2,4",
        "--leading",
        "127",
        "--budget-log2",
        "24",
    ]);
    assert_eq!(rep["outcome"], "fitted");
    let coeffs: Vec<&str> = rep["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(
        coeffs,
        ["114688", "-166656", "35168", "24240", "-7378", "-189", "127"]
    );
}

#[test]
fn fit_samples_underdetermined_exits_2() {
    // Three forced roots eat the n <= 2 samples; one equation cannot pin
    // four coefficients.
    let out = persym(&[
        "fit", "samples", "--i", "6", "--k", "7", "--max-n", "3", "--roots", "1,2,4",
    ]);
    assert_eq!(code(&out), 2);
    let rep = stdout_json(&out);
    assert_eq!(rep["outcome"], "underdetermined");
    assert_eq!(rep["free_dim"], 3);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = persym(&[
        "formula",
        "--i",
        "2",
        "--n",
        "3",
        "--k",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let file = std::fs::read(&path).unwrap();
    assert_eq!(file, out.stdout);
}

#[test]
fn reports_are_byte_identical_modulo_timing() {
    let strip_timing = |out: &Output| -> String {
        String::from_utf8(out.stdout.clone())
            .unwrap()
            .lines()
            .filter(|l| !l.trim_start().starts_with("\"elapsed_ms\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let args = ["verify", "--n", "2", "--k", "4"];
    let first = persym(&args);
    let second = persym(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(strip_timing(&first), strip_timing(&second));
}

#[test]
fn usage_errors_exit_2() {
    // clap rejects both a missing required flag and an unknown method.
    assert_eq!(code(&persym(&["census", "--n", "1"])), 2);
    assert_eq!(
        code(&persym(&[
            "rqnk", "--q", "1", "--n", "1", "--k", "1", "--method", "dowsing"
        ])),
        2
    );
    // verify needs either sizes or a report, not both.
    assert_eq!(
        code(&persym(&[
            "verify", "--n", "1", "--k", "1", "--from", "x.json"
        ])),
        2
    );
}
