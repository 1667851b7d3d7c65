use std::fs;
use std::path::Path;

use rainbow_cli::{run_with, EXIT_BUDGET, EXIT_INVALID, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["rainbow".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn gen_u39(dir: &Path) -> String {
    let inst = path(dir, "u39.toml");
    let (code, _, err) = run(&["gen", "--family", "uniform", "--n", "3", "--out", &inst]);
    assert_eq!(code, EXIT_OK, "{err}");
    inst
}

#[test]
fn solve_u39_finds_three() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_u39(dir.path());
    let report = path(dir.path(), "r.json");
    let (code, out, err) = run(&["solve", "--instance", &inst, "--brute", "--out", &report]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.starts_with("3 rainbow bases (exact 3)"), "{out}");
    let json = fs::read_to_string(&report).unwrap();
    assert!(json.contains("\"solver_rbs\": 3"));
    assert!(dir.path().join("r.log").exists());
}

#[test]
fn verify_accepts_solver_output() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_u39(dir.path());
    let report = path(dir.path(), "r.json");
    run(&["solve", "--instance", &inst, "--out", &report]);
    let log = path(dir.path(), "r.log");
    let (code, out, err) = run(&["verify", "--instance", &inst, "--log", &log, "--report", &report]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.starts_with("ok: 9 moves replayed, 3 rainbow bases"), "{out}");
}

#[test]
fn verify_rejects_tampered_log() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_u39(dir.path());
    let report = path(dir.path(), "r.json");
    run(&["solve", "--instance", &inst, "--out", &report]);
    let log = path(dir.path(), "r.log");
    // move 4 adds (4,2); make it add an element of colour 2 that move 3 already used
    let text = fs::read_to_string(&log).unwrap();
    assert!(text.contains("4 extend (1,2,0) | add 1 (4,2)"), "{text}");
    let tampered = text.replace("4 extend (1,2,0) | add 1 (4,2)", "4 extend (1,2,0) | add 1 (3,2)");
    let bad = path(dir.path(), "bad.log");
    fs::write(&bad, tampered).unwrap();
    let (code, _, err) = run(&["verify", "--instance", &inst, "--log", &bad]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("move 4"), "{err}");
}

#[test]
fn verify_rejects_mismatched_report() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_u39(dir.path());
    let report = path(dir.path(), "r.json");
    run(&["solve", "--instance", &inst, "--out", &report]);
    let text = fs::read_to_string(&report).unwrap().replace("\"moves\": 9", "\"moves\": 8");
    fs::write(&report, text).unwrap();
    let (code, _, err) = run(&["verify", "--instance", &inst, "--log", &path(dir.path(), "r.log"), "--report", &report]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("moves"), "{err}");
}

#[test]
fn bounds_worked_cases() {
    let (code, out, _) = run(&["bounds", "--n", "16", "--beta", "1", "--disjoint"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "bound 1 (applicable)\n");
    let (_, out, _) = run(&["bounds", "--n", "53", "--beta", "1", "--kappa", "1"]);
    assert_eq!(out, "bound 25 (applicable, alpha 26)\n");
    let (_, out, _) = run(&["bounds", "--n", "15", "--beta", "1", "--disjoint", "--format", "csv"]);
    assert_eq!(out.lines().nth(1), Some("15,1,1,true,,false,0"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["bogus"]).0, EXIT_USAGE);
    assert_eq!(run(&["bounds", "--n", "x", "--beta", "1"]).0, EXIT_USAGE);
    assert_eq!(run(&["solve", "--instance", "/nonexistent/file.toml"]).0, EXIT_USAGE);
    assert_eq!(run(&["harness", "--id", "no-such-harness"]).0, EXIT_USAGE);
    assert_eq!(run(&["--help"]).0, EXIT_OK);
}

#[test]
fn invalid_instance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "bad.toml");
    fs::write(&inst, "version = 1\nbases = [[0, 1], [2]]\n\n[matroid]\nfamily = \"uniform\"\nparams = { k = 2, m = 4 }\n").unwrap();
    let (code, _, err) = run(&["solve", "--instance", &inst]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("colour 2"), "{err}");
}

#[test]
fn brute_over_budget_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "big.toml");
    run(&["gen", "--family", "uniform", "--n", "7", "--out", &inst]);
    let (code, _, err) = run(&["brute", "--instance", &inst]);
    assert_eq!(code, EXIT_BUDGET, "{err}");
    let (code, out, _) = run(&["brute", "--instance", &gen_u39(dir.path())]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "3\n"));
}

#[test]
fn bench_is_ordered_and_deterministic() {
    let args = [
        "bench", "--family", "graphic", "--n", "3", "--count", "6", "--brute", "--no-timing", "--seed", "5",
    ];
    let (code, first, err) = run(&args);
    assert_eq!(code, EXIT_OK, "{err}");
    let mut single = args.to_vec();
    single.extend(["--threads", "1"]);
    let (_, second, _) = run(&single);
    assert_eq!(first, second);
    assert_eq!(first.lines().count(), 7);
    // row order follows the seeds: row i is the instance generated from seed 5+i
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "g.toml");
    run(&["gen", "--family", "graphic", "--n", "3", "--seed", "7", "--out", &inst]);
    let digest = rainbow_core::workbench::parse_instance(&fs::read_to_string(&inst).unwrap())
        .unwrap()
        .digest();
    assert!(first.lines().nth(3).unwrap().starts_with(&digest));
}

#[test]
fn harness_single_id_runs() {
    let (code, out, err) = run(&["harness", "--id", "swap-implies-add", "--instances", "4"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.starts_with("swap-implies-add: "), "{out}");
    let (_, csv, _) = run(&["harness", "--id", "exchange-injection", "--instances", "3", "--format", "csv"]);
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().nth(1).unwrap().starts_with("exchange-injection,"));
}

#[test]
fn gen_writes_canonical_text() {
    let (code, out, _) = run(&["gen", "--family", "sparse-paving", "--n", "4", "--seed", "3"]);
    assert_eq!(code, EXIT_OK);
    let inst = rainbow_core::workbench::parse_instance(&out).unwrap();
    assert_eq!(rainbow_core::workbench::emit_instance(&inst), out);
    let (code, _, err) = run(&["gen", "--family", "uniform", "--n", "3", "--mode", "overlapping", "--kappa", "1", "--ground", "8"]);
    assert_eq!(code, EXIT_USAGE, "{err}");
}
