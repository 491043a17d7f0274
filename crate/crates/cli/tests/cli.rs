use std::path::Path;
use std::process::{Command, Output};

fn matdeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matdeg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const PATH: &str = r#"{"vertices": [0, 1, 2, 3],
  "edges": [{"id": 0, "u": 0, "v": 1, "cost": 2}, {"id": 1, "u": 1, "v": 2, "cost": "1/2"},
            {"id": 2, "u": 2, "v": 3, "cost": 5}]}"#;

const STAR: &str = r#"{"vertices": [0, 1, 2, 3],
  "edges": [{"id": 0, "u": 0, "v": 1, "cost": 1}, {"id": 1, "u": 0, "v": 2, "cost": 1},
            {"id": 2, "u": 0, "v": 3, "cost": 1}],
  "constraints": {"0": {"kind": "uniform", "rank": 1}}}"#;

#[test]
fn free_path_is_optimal() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "path.json", PATH);
    let out = matdeg(&["solve", &p]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["status"], "optimal");
    assert_eq!(r["cost"], "15/2");
    assert_eq!(r["tree"], serde_json::json!([0, 1, 2]));
    assert!(r["violations"]
        .as_object()
        .unwrap()
        .values()
        .all(|v| v == 0));
}

#[test]
fn infeasible_star_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "star.json", STAR);
    let out = matdeg(&["solve", &p]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "infeasible");
}

#[test]
fn parse_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "bad.json",
        r#"{"vertices": [0, 1], "edges": [{"id": 0, "u": 0, "v": 1}]}"#,
    );
    let out = matdeg(&["solve", &p]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "error");
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn generated_instance_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("g.json");
    let res = dir.path().join("r.json");
    let gen = matdeg(&[
        "gen",
        "--kind",
        "laminar",
        "--n",
        "6",
        "--m",
        "11",
        "--seed",
        "4",
        "--out",
        inst.to_str().unwrap(),
    ]);
    assert_eq!(gen.status.code(), Some(0));
    let out = matdeg(&[
        "solve",
        inst.to_str().unwrap(),
        "--verify",
        "--debug-asserts",
        "--out",
        res.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&res).unwrap()).unwrap();
    let checks = r["verification"]["checks"].as_object().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.values().all(|c| c["status"] == "pass"), "{checks:?}");
}

#[test]
fn gen_is_deterministic() {
    let a = matdeg(&[
        "gen",
        "--kind",
        "partition",
        "--n",
        "5",
        "--m",
        "9",
        "--seed",
        "11",
    ]);
    let b = matdeg(&[
        "gen",
        "--kind",
        "partition",
        "--n",
        "5",
        "--m",
        "9",
        "--seed",
        "11",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let bad = matdeg(&["gen", "--kind", "partition", "--n", "5", "--m", "2"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn solve_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("g.json");
    matdeg(&[
        "gen",
        "--kind",
        "mixed",
        "--n",
        "7",
        "--m",
        "13",
        "--seed",
        "2",
        "--out",
        inst.to_str().unwrap(),
    ]);
    let args = [
        "solve",
        inst.to_str().unwrap(),
        "--trace",
        "--verify",
        "--seed",
        "5",
    ];
    assert_eq!(matdeg(&args).stdout, matdeg(&args).stdout);
}

#[test]
fn verify_directory_with_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results");
    let inputs = dir.path().join("in");
    std::fs::create_dir(&inputs).unwrap();
    write(&inputs, "path.json", PATH);
    for seed in 0..3 {
        let p = inputs.join(format!("g{seed}.json"));
        matdeg(&[
            "gen",
            "--kind",
            "uniform-deg",
            "--seed",
            &seed.to_string(),
            "--out",
            p.to_str().unwrap(),
        ]);
    }
    let out = matdeg(&[
        "verify",
        inputs.to_str().unwrap(),
        "--jobs",
        "2",
        "--out",
        results.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 4);
    assert!(results.join("g1.json").exists());

    write(&inputs, "star.json", STAR);
    let out = matdeg(&["verify", inputs.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thresholds_are_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "path.json", PATH);
    let out = matdeg(&["solve", &p, "--st-threshold", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["error"].as_str().unwrap().contains("limit"));
    // the oracle skips enumeration beyond its threshold instead of failing
    let out = matdeg(&["verify", &p, "--oracle-threshold", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json(&out)["verification"]["checks"]["cost_le_opt"]["status"],
        "skipped"
    );
}
