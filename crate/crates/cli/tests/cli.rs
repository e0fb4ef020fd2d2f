use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ksubmod::instances::Instance;
use ksubmod::properties::Witness;
use serde_json::{json, Value};
use tempfile::TempDir;

fn ksubmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ksubmod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = ksubmod(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn two_element_modular(dir: &TempDir) -> PathBuf {
    write(
        dir,
        "modular.json",
        &json!({
            "k": 2,
            "ground": ["a", "b"],
            "function": {"type": "assignment_modular", "weights": {"a": [1.0, 3.0], "b": [4.0, 2.0]}}
        }),
    )
}

#[test]
fn deterministic_solve_reports_ratio_against_the_optimum() {
    let dir = TempDir::new().unwrap();
    let inst = two_element_modular(&dir);
    let r = ok_json(&["solve", "--instance", s(&inst)]);
    assert_eq!(r["algorithm"], "deterministic");
    assert_eq!(r["optimum"], 7.0);
    assert!(r["ratio"].as_f64().unwrap() >= 2.0 / 3.0);
    assert_eq!(r["pass"], true);
    assert_eq!(r["version"], ksubmod::VERSION);
    assert_eq!(r["config"]["budget"], 1_000_000);
    assert_eq!(r["solution"].as_object().unwrap().len(), 2);
    assert!(r["total_queries"].as_u64().unwrap() <= r["query_bound"].as_u64().unwrap());
    assert!(r["min_certificate_margin"].as_f64().unwrap() >= -1e-9);
    assert_eq!(r["trace"].as_array().unwrap().len(), 2);
}

#[test]
fn randomized_reports_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let inst = two_element_modular(&dir);
    let args = [
        "solve",
        "--instance",
        s(&inst),
        "--algorithm",
        "rand",
        "--seed",
        "7",
    ];
    let a = ksubmod(&args);
    let b = ksubmod(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["pass"], true);
    assert!(r["expected_ratio"].as_f64().unwrap() >= 2.0 / 3.0);
}

#[test]
fn randomized_without_seed_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let inst = two_element_modular(&dir);
    let out = ksubmod(&["solve", "--instance", s(&inst), "--algorithm", "rand"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn malformed_instances_exit_with_parse_code() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"k\": 2, \"ground\": [").unwrap();
    assert_eq!(
        ksubmod(&["solve", "--instance", s(&bad)]).status.code(),
        Some(2)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        ksubmod(&["verify", "--instance", s(&missing)])
            .status
            .code(),
        Some(2)
    );
    let negative = write(
        &dir,
        "neg.json",
        &json!({"k": 1, "ground": ["a"], "function": {"type": "assignment_modular", "weights": {"a": [-1.0]}}}),
    );
    assert_eq!(
        ksubmod(&["solve", "--instance", s(&negative)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_passes_on_modular_instances() {
    let dir = TempDir::new().unwrap();
    let inst = two_element_modular(&dir);
    let r = ok_json(&["verify", "--instance", s(&inst)]);
    let report = &r["report"];
    for key in [
        "monotone",
        "k_submodular",
        "orthant_submodular",
        "pairwise_monotone",
        "nonnegative",
    ] {
        assert_eq!(report[key]["holds"], true, "{key}");
    }
    assert_eq!(report["equivalence_consistent"], true);
    assert_eq!(r["monotone_k_submodular"], true);
}

#[test]
fn verify_reports_replayable_witnesses() {
    let dir = TempDir::new().unwrap();
    let doc = json!({
        "k": 2,
        "ground": ["a", "b"],
        "function": {"type": "table", "values": {
            "0,0": 0.0, "0,1": 5.0, "0,2": 5.0, "1,0": 5.0, "2,0": 5.0,
            "1,1": 12.0, "1,2": 10.0, "2,1": 10.0, "2,2": 6.0
        }}
    });
    let inst = write(&dir, "table.json", &doc);
    let r = ok_json(&["verify", "--instance", s(&inst)]);
    assert_eq!(r["monotone_k_submodular"], false);
    assert_eq!(r["report"]["equivalence_consistent"], true);
    let f = Instance::from_json(&doc.to_string()).unwrap();
    let failed = &r["report"]["k_submodular"];
    assert_eq!(failed["holds"], false);
    let w: Witness = serde_json::from_value(failed["witness"].clone()).unwrap();
    let v = w.violation(&f).unwrap();
    assert!(v > 0.0);
    assert_eq!(failed["violation"].as_f64().unwrap(), v);

    // Solving the same table is refused as invalid input.
    assert_eq!(
        ksubmod(&["solve", "--instance", s(&inst)]).status.code(),
        Some(2)
    );
}

#[test]
fn bench_rows_respect_the_bounds() {
    let out = ksubmod(&["bench", "--rows", "3:2:all:0-2"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 9);
    for row in &rows {
        assert_eq!(row[col("query_bound")], "30");
        let queries: u64 = row[col("queries")].parse().unwrap();
        assert!(queries <= 30);
        let ratio: f64 = row[col("ratio")].parse().unwrap();
        assert!(ratio >= 2.0 / 3.0);
        let support: usize = row[col("support_max")].parse().unwrap();
        assert!(support <= 7);
        assert_eq!(row[col("pass")], "true");
    }
}

#[test]
fn bench_output_is_stable() {
    let a = ksubmod(&["bench", "--rows", "2-4:2:table:1,3:3:coverage:4"]);
    let b = ksubmod(&["bench", "--rows", "2-4:2:table:1,3:3:coverage:4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 5);
    assert_eq!(ksubmod(&["bench", "--rows", "3:2"]).status.code(), Some(2));
}

#[test]
fn generated_instances_feed_the_solver() {
    let dir = TempDir::new().unwrap();
    for family in ["modular", "coverage", "table"] {
        let path = dir.path().join(format!("{family}.json"));
        let gen = ksubmod(&[
            "gen",
            "--seed",
            "11",
            "--n",
            "4",
            "--k",
            "3",
            "--family",
            family,
            "--out",
            s(&path),
        ]);
        assert!(gen.status.success());
        let text = fs::read_to_string(&path).unwrap();
        let parsed = Instance::from_json(&text).unwrap();
        assert_eq!(format!("{}\n", parsed.to_json()), text);
        let r = ok_json(&["solve", "--instance", s(&path)]);
        assert_eq!(r["pass"], true);
    }
}

#[test]
fn generation_is_byte_deterministic() {
    let args = [
        "gen", "--seed", "5", "--n", "3", "--k", "2", "--family", "table",
    ];
    let a = ksubmod(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, ksubmod(&args).stdout);
    let other = ksubmod(&[
        "gen", "--seed", "6", "--n", "3", "--k", "2", "--family", "table",
    ]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn generated_tables_verify() {
    let dir = TempDir::new().unwrap();
    for seed in 0..50 {
        let n = 2 + (seed % 2);
        let path = dir.path().join(format!("t{seed}.json"));
        let gen = ksubmod(&[
            "gen",
            "--seed",
            &seed.to_string(),
            "--n",
            &n.to_string(),
            "--k",
            "2",
            "--family",
            "table",
            "--out",
            s(&path),
        ]);
        assert!(gen.status.success());
        let r = ok_json(&["verify", "--instance", s(&path)]);
        assert_eq!(r["monotone_k_submodular"], true, "seed {seed}");
    }
}

#[test]
fn budget_refusals_exit_with_code_three() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("big.json");
    assert!(ksubmod(&[
        "gen",
        "--seed",
        "1",
        "--n",
        "6",
        "--k",
        "2",
        "--family",
        "modular",
        "--out",
        s(&path)
    ])
    .status
    .success());
    assert_eq!(
        ksubmod(&["brute", "--instance", s(&path), "--budget", "100"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        ksubmod(&["verify", "--instance", s(&path), "--budget", "1000"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        ksubmod(&[
            "gen", "--seed", "1", "--n", "2", "--k", "2", "--family", "table", "--budget", "0"
        ])
        .status
        .code(),
        Some(3)
    );

    // Past the budget the solver still runs but makes no ratio claims.
    let r = ok_json(&["solve", "--instance", s(&path), "--budget", "100"]);
    assert!(r["optimum"].is_null() && r["ratio"].is_null() && r["pass"].is_null());
    assert!(r["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn order_and_trace_files() {
    let dir = TempDir::new().unwrap();
    let inst = two_element_modular(&dir);
    let order = write(&dir, "order.json", &json!(["b", "a"]));
    let trace = dir.path().join("trace.jsonl");
    let out = dir.path().join("report.json");
    let status = ksubmod(&[
        "solve",
        "--instance",
        s(&inst),
        "--order",
        s(&order),
        "--trace",
        s(&trace),
        "--out",
        s(&out),
    ]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let r: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["pass"], true);
    let lines: Vec<Value> = fs::read_to_string(&trace)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["j"], 1);

    let bad = write(&dir, "bad_order.json", &json!(["a", "z"]));
    assert_eq!(
        ksubmod(&["solve", "--instance", s(&inst), "--order", s(&bad)])
            .status
            .code(),
        Some(2)
    );

    let brute = ok_json(&["brute", "--instance", s(&inst)]);
    assert_eq!(brute["optimum"], 7.0);
    assert_eq!(brute["optimum_solution"]["a"], 2);
}
