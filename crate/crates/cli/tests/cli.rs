use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("ckmo-cli-{name}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Self(dir)
    }

    fn path(&self, file: &str) -> String {
        self.0.join(file).to_string_lossy().into_owned()
    }

    fn write(&self, file: &str, text: &str) -> String {
        let p = self.path(file);
        std::fs::write(&p, text).unwrap();
        p
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn ckmo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ckmo"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const LINE: &str = r#"{
  "points": [[1], [2], [5], [0], [6]],
  "clients": [0, 1, 2],
  "facilities": [3, 4],
  "capacities": {"3": 2, "4": 1},
  "k": 2,
  "m": 1
}"#;

#[test]
fn solve_then_verify() {
    let dir = Scratch::new("roundtrip");
    let inst = dir.write("inst.json", LINE);
    let sol = dir.path("sol.json");
    let out = ckmo(&["solve", "-i", &inst, "-o", &sol]);
    assert!(out.status.success(), "{}", stderr(&out));
    let solution: Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    // Drop the client at 2, serve 1 from 0 and 5 from 6.
    assert_eq!(solution["cost"], 2.0);
    assert_eq!(solution["outliers"], serde_json::json!({"1": 1}));
    assert_eq!(solution["partial"], false);
    assert!(solution["report"]["attempts"][0]["within_bound"]
        .as_bool()
        .unwrap());
    let checked = ckmo(&["verify", "-i", &inst, "-s", &sol]);
    assert!(checked.status.success(), "{}", stderr(&checked));
    assert_eq!(json(&checked)["valid"], true);
}

#[test]
fn tampered_solution_names_the_facility() {
    let dir = Scratch::new("tamper");
    let inst = dir.write("inst.json", LINE);
    let bad = dir.write(
        "bad.json",
        r#"{"open": [3, 4], "assignment": [[0, 4, 1], [1, 4, 1], [2, 4, 1]],
            "outliers": {}, "assignment_cost": 11.0, "cost": 11.0}"#,
    );
    let out = ckmo(&["verify", "-i", &inst, "-s", &bad]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(
        err.contains("capacity exceeded at facility 1 (point 4)"),
        "{err}"
    );
    assert_eq!(json(&out)["valid"], false);
}

#[test]
fn oracle_and_solve_agree_without_sampling() {
    let dir = Scratch::new("oracle");
    let inst = dir.path("inst.json");
    for seed in ["1", "2", "3"] {
        let gen = ckmo(&[
            "generate",
            "--n",
            "10",
            "--facilities",
            "4",
            "--k",
            "2",
            "--m",
            "2",
            "--seed",
            seed,
            "-o",
            &inst,
        ]);
        assert!(gen.status.success());
        let solved = json(&ckmo(&["solve", "-i", &inst, "--plugin", "exact"]));
        let oracle = json(&ckmo(&["oracle", "-i", &inst]));
        assert_eq!(solved["cost"], oracle["cost"], "seed {seed}");
    }
}

#[test]
fn exit_codes() {
    let dir = Scratch::new("codes");
    let inst = dir.write("inst.json", LINE);
    let limited = ckmo(&["solve", "-i", &inst, "--max-guesses", "1"]);
    assert_eq!(limited.status.code(), Some(4), "{}", stderr(&limited));

    let fair = dir.write(
        "fair.json",
        &LINE.replace("\"m\": 1", "\"m\": 0, \"groups\": {\"0\": [0, 1], \"1\": [2]}, \"alpha\": [\"1/2\", \"1/2\"], \"beta\": [\"1/2\", \"1/2\"], \"m_vec\": [0, 0]"),
    );
    let infeasible = ckmo(&["solve", "-i", &fair, "--fair"]);
    assert_eq!(infeasible.status.code(), Some(2), "{}", stderr(&infeasible));

    let broken = dir.write(
        "broken.json",
        "{\n  \"points\": [[0]],\n  \"clients\": [0,]\n}",
    );
    let parse = ckmo(&["solve", "-i", &broken]);
    assert_eq!(parse.status.code(), Some(3));
    assert!(stderr(&parse).contains("line 3"), "{}", stderr(&parse));

    let short = dir.write(
        "short.json",
        &LINE.replace("\"3\": 2, \"4\": 1", "\"3\": 1, \"4\": 0"),
    );
    let invalid = ckmo(&["solve", "-i", &short]);
    assert_eq!(invalid.status.code(), Some(3));
    assert!(
        stderr(&invalid).contains("infeasible: k largest capacities"),
        "{}",
        stderr(&invalid)
    );

    let eps = ckmo(&["solve", "-i", &inst, "--epsilon", "1.5"]);
    assert_eq!(eps.status.code(), Some(3));
}

#[test]
fn csv_points() {
    let dir = Scratch::new("csv");
    let csv = dir.write(
        "pts.csv",
        "x,y,role,capacity\n0,0,client,\n1,0,client,\n0,1,both,3\n9,9,facility,1\n",
    );
    let out = ckmo(&["solve", "-i", &csv, "--k", "1", "--m", "0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let sol = json(&out);
    assert_eq!(sol["open"], serde_json::json!([2]));
    let missing = ckmo(&["solve", "-i", &csv]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn coreset_and_bench_outputs() {
    let dir = Scratch::new("coreset");
    let inst = dir.path("inst.json");
    assert!(
        ckmo(&["generate", "--n", "30", "--dim", "3", "--seed", "2", "-o", &inst])
            .status
            .success()
    );
    let coreset = json(&ckmo(&[
        "coreset",
        "-i",
        &inst,
        "--sample-size",
        "2",
        "--seed",
        "1",
    ]));
    let total: u64 = coreset["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e[1].as_u64().unwrap())
        .sum();
    assert_eq!(total, 30);
    assert_eq!(coreset["meta"]["s_effective"], 2);

    let csv = dir.path("trials.csv");
    let bench = ckmo(&["bench", "mcfo", "--trials", "25", "--csv", &csv]);
    assert!(bench.status.success());
    assert_eq!(json(&bench)["passed"], true);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 26);
}
