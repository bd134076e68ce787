use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(self.stdout.trim()).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn vc(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_vc")).args(args).output().unwrap();
    Run { code: out.status.code().unwrap(), stdout: String::from_utf8(out.stdout).unwrap() }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const P3: &str = "0 1\n1 2\n";
const C4: &str = "p 4 4\n0 1\n1 2\n2 3\n3 0\n";
const PETERSEN: &str = "0 1\n1 2\n2 3\n3 4\n4 0\n0 5\n1 6\n2 7\n3 8\n4 9\n5 7\n7 9\n9 6\n6 8\n8 5\n";

#[test]
fn solve_path_with_verification() {
    let dir = TempDir::new().unwrap();
    let p3 = write(&dir, "p3.txt", P3);
    let run = vc(&["solve", "--input", s(&p3), "--seed", "1", "--verify"]);
    assert_eq!(run.code, 0);
    let v = run.json();
    assert_eq!(v["schema"], "vcframe/1");
    assert_eq!(v["status"], "ok");
    assert_eq!(v["kappa"], 1);
    assert_eq!(v["verified"], true);
    assert_eq!(v["cut"]["S"], serde_json::json!([1]));
}

#[test]
fn stcut_on_four_cycle() {
    let dir = TempDir::new().unwrap();
    let c4 = write(&dir, "c4.txt", C4);
    let v = vc(&["stcut", "--input", s(&c4), "-s", "0", "-t", "2", "--verify"]).json();
    assert_eq!(v["kappa"], 2);
    assert_eq!(v["separator"], serde_json::json!([1, 3]));
    assert_eq!(v["verified"], true);
}

#[test]
fn every_solver_verifies_on_petersen() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "petersen.txt", PETERSEN);
    let g = s(&g);
    let runs: Vec<Vec<&str>> = vec![
        vec!["solve", "--input", g],
        vec!["solve", "--input", g, "-t", "3"],
        vec!["sink-cut", "--input", g, "-t", "4"],
        vec!["cluster", "--input", g, "--ell", "3", "--planted", "0,1"],
        vec!["isocut", "--input", g, "--cluster", "0,1,2,3,4,5", "--terminals", "0,2"],
        vec!["minnncc", "--input", g, "--cluster", "0,1,2", "--ell", "3", "--via-embedding"],
        vec!["embed", "--input", g, "-t", "0"],
        vec!["oracle", "--input", g],
        vec!["oracle", "--input", g, "--kind", "stcut", "-s", "0", "-t", "2"],
        vec!["oracle", "--input", g, "--kind", "sink-cut", "-t", "0"],
    ];
    for mut args in runs {
        args.extend(["--seed", "5", "--verify"]);
        let run = vc(&args);
        assert_eq!(run.code, 0, "{args:?}: {}", run.stdout);
        assert_eq!(run.json()["verified"], true, "{args:?}");
    }
}

#[test]
fn answers_are_deterministic_under_a_seed() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "petersen.txt", PETERSEN);
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_ms");
        v.to_string()
    };
    for args in [
        vec!["solve", "--input", s(&g), "--seed", "9"],
        vec!["cluster", "--input", s(&g), "--ell", "2", "--seed", "9"],
    ] {
        assert_eq!(strip(vc(&args).json()), strip(vc(&args).json()));
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let p3 = write(&dir, "p3.txt", P3);
    assert_eq!(vc(&["frobnicate"]).code, 2);
    assert_eq!(vc(&["solve", "--input", s(&p3), "--bogus"]).code, 2);
    let run = vc(&["stcut", "--input", s(&p3), "-s", "0", "-t", "7"]);
    assert_eq!(run.code, 2);
    assert_eq!(run.json()["status"], "usage-error");
    let run = vc(&["solve", "--input", s(&dir.path().join("missing.txt"))]);
    assert_eq!(run.code, 1);
    assert_eq!(run.json()["status"], "error");
    let bad = write(&dir, "loop.txt", "0 0\n");
    assert_ne!(vc(&["solve", "--input", s(&bad)]).code, 0);
}

#[test]
fn flags_override_the_config_file() {
    let dir = TempDir::new().unwrap();
    let p3 = write(&dir, "p3.txt", P3);
    let cfg = write(&dir, "run.toml", "[solver]\nseed = 7\nverify = true\n");
    let v = vc(&["solve", "--input", s(&p3), "--config", s(&cfg)]).json();
    assert_eq!((v["seed"].as_u64(), v["verified"].as_bool()), (Some(7), Some(true)));
    let v = vc(&["solve", "--input", s(&p3), "--config", s(&cfg), "--seed", "3"]).json();
    assert_eq!(v["seed"], 3);
    let broken = write(&dir, "broken.toml", "[solver]\nsede = 1\n");
    assert_eq!(vc(&["solve", "--input", s(&p3), "--config", s(&broken)]).code, 2);
}

#[test]
fn comm_sim_reports_a_transcript() {
    let dir = TempDir::new().unwrap();
    let split = write(&dir, "p3.split", "p 3 2\nA 0 1\nB 1 2\n");
    let v = vc(&["comm-sim", "--split", s(&split), "-t", "2", "--verify"]).json();
    assert_eq!(v["kappa"], 1);
    assert_eq!(v["verified"], true);
    let tr = &v["transcript"];
    let total = tr["bits_alice_to_bob"].as_u64().unwrap() + tr["bits_bob_to_alice"].as_u64().unwrap();
    assert!(total > 0);
    assert_eq!(v["counters"]["total_bits"].as_u64(), Some(total));
    let logged: u64 = tr["calls"].as_array().unwrap().iter().map(|c| c["bits"].as_u64().unwrap()).sum();
    assert_eq!(logged, total);
}

#[test]
fn gadget_round_trips_through_the_solver_input() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("gadget.txt");
    for (mode, class) in [("yes", "EQ_n_over_2"), ("no", "GE_n_over_2_plus_1")] {
        let v = vc(&["gadget", "--sqrt-n", "4", "--mode", mode, "--seed", "2", "--verify", "--output", s(&out)]).json();
        assert_eq!(v["expected"], class);
        assert_eq!(v["verified"], true);
        assert_eq!(v["graph_n"], 32);
        let o = vc(&["oracle", "--input", s(&out)]).json();
        assert_eq!(o["kappa"], v["kappa"]);
    }
    assert_eq!(vc(&["gadget", "--sqrt-n", "4", "--mode", "maybe"]).code, 2);
    assert_eq!(vc(&["gadget", "--sqrt-n", "5", "--mode", "yes"]).code, 2);
}

#[test]
fn bench_writes_csv_rows() {
    let run = vc(&["bench", "--suite", "comm-scaling", "--sizes", "16,32", "--format", "csv"]);
    assert_eq!(run.code, 0);
    let lines: Vec<&str> = run.stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    let header: Vec<&str> = lines[0].split(',').collect();
    assert!(header.contains(&"bits") && header.contains(&"bits_per_n15"));
    let v = vc(&["bench", "--suite", "global", "--sizes", "12"]).json();
    let row = &v["rows"][0];
    assert!(row["kappa"].as_u64() >= row["flow_kappa"].as_u64());
}
