//! End-to-end checks of the `iml` binary: output shapes, exit codes,
//! cache behavior, and cross-command consistency.

use std::path::Path;
use std::process::{Command, Output};

fn iml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iml"))
        .args(args)
        .env_remove("IML_CACHE")
        .output()
        .expect("binary runs")
}

fn iml_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iml"))
        .args(args)
        .env_remove("IML_CACHE")
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn solve_prints_verified_json() {
    let out = iml(&["f", "--n", "3", "--m", "4"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["n"], 3);
    assert_eq!(value["m"], 4);
    assert_eq!(value["f"], 4);
    let witness: Vec<u64> = value["witness"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    let w = iml_core::Witness::new(witness);
    assert_eq!(iml_core::verify_witness(3, 4, 4, &w), Ok(()));
    // the reported deficient set must actually be deficient at f - 1
    let violator: Vec<u64> = value["violator"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert!(!violator.is_empty());
    let covered = iml_core::covered_count(&violator, 4, 3);
    assert!(covered < violator.len() as u64);
}

#[test]
fn csv_format_for_solve_on_request() {
    let out = iml(&["f", "--n", "1", "--m", "7", "--format", "csv", "--no-meta"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "n,m,f,witness,violator\n1,7,1,8,1\n");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&iml(&["f", "--n", "0", "--m", "1"])), 2);
    assert_eq!(code(&iml(&["f", "--n", "3"])), 2); // missing --m
    assert_eq!(code(&iml(&["f", "--n", "3", "--m", "1", "--bogus"])), 2);
    assert_eq!(code(&iml(&["no-such-command"])), 2);
    assert_eq!(code(&iml(&["chain", "--n", "2"])), 2);
    assert_eq!(code(&iml(&["hunt", "--n", "3", "--budget", "0"])), 2);
    assert_eq!(code(&iml(&["bounds", "--n-list", "2,10"])), 2);
    assert_eq!(code(&iml(&["scan", "--n", "25"])), 2); // residue space above cap
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&iml(&["--help"])), 0);
    assert_eq!(code(&iml(&["--version"])), 0);
    assert_eq!(code(&iml(&["f", "--help"])), 0);
}

#[test]
fn lemma1_grid_is_all_green() {
    let out = iml(&["lemma1", "--n-max", "5", "--k-max", "2", "--no-meta"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,k,lhs,rhs,holds,witness_ok");
    assert_eq!(lines.len(), 1 + 10);
    for row in &lines[1..] {
        assert!(row.ends_with(",true,true"), "bad row: {row}");
    }
    // k = 1 rows are exact equalities
    for row in lines[1..].iter().filter(|r| r.split(',').nth(1) == Some("1")) {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[2], cells[3], "k=1 must be tight: {row}");
    }
}

#[test]
fn hunt_never_beats_scan() {
    let scan = iml(&["scan", "--n", "6", "--no-meta"]);
    let hunt = iml(&["hunt", "--n", "6", "--budget", "40", "--seed", "3", "--no-meta"]);
    assert_eq!(code(&scan), 0);
    assert_eq!(code(&hunt), 0);
    let best = |out: &Output| -> u64 {
        stdout(out)
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(3)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(best(&hunt) <= best(&scan));
}

#[test]
fn cache_round_trip_and_reuse() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let cache_str = cache.to_str().unwrap();

    let first = iml(&["f", "--n", "3", "--m", "4", "--cache", cache_str]);
    assert_eq!(code(&first), 0);
    let contents = std::fs::read_to_string(&cache).unwrap();
    assert!(contents.contains(r#"{"v":"1","n":3,"mc":4,"f":4}"#), "cache was: {contents}");

    // a scan warms every residue and can reuse the solved one
    let scan = iml(&["scan", "--n", "3", "--cache", cache_str, "--no-meta"]);
    assert_eq!(code(&scan), 0);
    let lines = std::fs::read_to_string(&cache).unwrap().lines().count();
    assert_eq!(lines, 6); // lcm(1..=3) residue classes

    // identical invocations stay identical with a warm cache
    let again = iml(&["scan", "--n", "3", "--cache", cache_str, "--no-meta"]);
    assert_eq!(stdout(&scan), stdout(&again));
}

#[test]
fn cache_env_variable_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("via-env.jsonl");
    let out = iml_env(
        &["f", "--n", "2", "--m", "5"],
        "IML_CACHE",
        cache.to_str().unwrap(),
    );
    assert_eq!(code(&out), 0);
    assert!(cache.exists());
    let contents = std::fs::read_to_string(&cache).unwrap();
    assert!(contents.contains(r#""n":2,"mc":1"#), "cache was: {contents}");
}

fn write_shard(path: &Path, lines: &[&str]) {
    std::fs::write(path, lines.join("\n") + "\n").unwrap();
}

#[test]
fn cache_merge_unions_disjoint_shards() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let out_path = dir.path().join("merged.jsonl");
    write_shard(&a, &[r#"{"v":"1","n":3,"mc":4,"f":4}"#]);
    write_shard(
        &b,
        &[
            r#"{"v":"1","n":3,"mc":3,"f":3}"#,
            r#"{"v":"1","n":3,"mc":4,"f":4}"#,
        ],
    );
    let out = iml(&[
        "cache",
        "merge",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "-o",
        out_path.to_str().unwrap(),
        "--no-meta",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        stdout(&out),
        format!("records,out\n2,{}\n", out_path.display())
    );
    let merged = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(merged.lines().count(), 2);
}

#[test]
fn cache_merge_rejects_conflicts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    write_shard(&a, &[r#"{"v":"1","n":3,"mc":4,"f":4}"#]);
    write_shard(&b, &[r#"{"v":"1","n":3,"mc":4,"f":5}"#]);
    let out = iml(&[
        "cache",
        "merge",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "-o",
        dir.path().join("merged.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("conflict"), "stderr was: {err}");
}

#[test]
fn oracle_agrees_with_solver_and_guards() {
    let solved = iml(&["f", "--n", "5", "--m", "9"]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&solved)).unwrap();
    let oracle = iml(&["oracle", "f", "--n", "5", "--m", "9", "--no-meta"]);
    assert_eq!(code(&oracle), 0);
    let cell: u64 = stdout(&oracle)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(serde_json::json!(cell), value["f"]);

    assert_eq!(code(&iml(&["oracle", "f", "--n", "11", "--m", "0"])), 2);
    let lifted = iml(&["oracle", "f", "--n", "11", "--m", "0", "--guard", "11", "--no-meta"]);
    assert_eq!(code(&lifted), 0);
    assert_eq!(code(&iml(&["oracle", "hall", "--n", "21", "--m", "0", "--len", "21"])), 2);

    let hall = iml(&["oracle", "hall", "--n", "3", "--m", "4", "--len", "4", "--no-meta"]);
    assert_eq!(stdout(&hall), "n,m,len,feasible\n3,4,4,true\n");
}

#[test]
fn chain_reports_five_links() {
    let out = iml(&["chain", "--n", "3", "--no-meta"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "link,lhs,rhs,holds");
    assert_eq!(lines.len(), 6);
    let names: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["max_dominates", "rescaling", "growth", "identity", "gap"]);
    // the analytic and exact links always hold
    assert!(lines[1].ends_with(",true"));
    assert!(lines[2].ends_with(",true"));
    assert!(lines[4].ends_with(",true"));
}

#[test]
fn bounds_emits_json_rows_on_request() {
    let out = iml(&["bounds", "--n-list", "10,20", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = value.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["n"], 10);
    assert_eq!(rows[1]["n"], 20);
    assert!(rows[0]["f_nn"].as_u64().unwrap() >= 10);
    assert!(rows[0]["lower_env"].as_f64().unwrap() > 0.0);
}

#[test]
fn meta_line_appears_only_without_no_meta() {
    let with_meta = iml(&["scan", "--n", "2"]);
    assert!(stdout(&with_meta).starts_with("# iml scan --n 2 | unix-time "));
    let without = iml(&["scan", "--n", "2", "--no-meta"]);
    assert!(without
        .stdout
        .starts_with(b"n,strategy,best_m,best_f,f_nn,gap,evaluations,seed\n"));
    // JSON output never carries the comment
    let json = iml(&["scan", "--n", "2", "--format", "json"]);
    assert!(stdout(&json).trim_start().starts_with('{'));
}

#[test]
fn output_flag_writes_file_instead_of_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = iml(&[
        "scan",
        "--n",
        "3",
        "--no-meta",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n,strategy"));
}
