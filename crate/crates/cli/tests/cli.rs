use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const PETERSEN: &str = "10 3\n1 2\n2 3\n3 4\n4 5\n1 5\n1 6\n2 7\n3 8\n4 9\n5 10\n6 8\n8 10\n7 10\n7 9\n6 9\n";
const SQUARE_CONSISTENT: &str = "4 2\n2 4\n3 1\n4 2\n1 3\n";

fn rotwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotwalk")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Work { dir: TempDir::new().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        s(&p)
    }

    fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.path(name)).unwrap()
    }
}

fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn gen_families() {
    let o = rotwalk(&["gen", "cycle", "4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "4 2\n1 2\n1 4\n2 3\n3 4\n");
    assert_eq!(stdout(&rotwalk(&["gen", "complete", "2"])), "2 1\n1 2\n");

    let o = rotwalk(&["gen", "random-regular", "80", "12", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("80 12\n"));
    assert_eq!(text.lines().count(), 1 + 80 * 12 / 2);
}

#[test]
fn gen_rejects_bad_parameters() {
    for args in [&["gen", "cycle", "2"][..], &["gen", "random-regular", "5", "3"], &["gen", "nope", "3"], &["gen", "torus", "3"]] {
        let o = rotwalk(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn rotmap_greedy_and_from_file() {
    let w = Work::new();
    let sq = w.write("sq.txt", &stdout(&rotwalk(&["gen", "cycle", "4"])));
    let o = rotwalk(&["rotmap", &sq]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "4 2\n2 4\n1 3\n2 4\n1 3\n");

    let good = w.write("eq1.rot", SQUARE_CONSISTENT);
    let o = rotwalk(&["rotmap", &sq, "--mode", "from-file", "--map", &good]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), SQUARE_CONSISTENT);

    let bad = w.write("bad.rot", "4 2\n3 4\n3 1\n4 2\n1 3\n");
    let o = rotwalk(&["rotmap", &sq, "--mode", "from-file", "--map", &bad]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains('3'));
}

#[test]
fn check_reports() {
    let w = Work::new();
    let eq1 = w.write("eq1.rot", SQUARE_CONSISTENT);
    let v: Value = serde_json::from_slice(&rotwalk(&["check", &eq1]).stdout).unwrap();
    assert_eq!(v["version"], "1");
    assert_eq!(v["consistent"], true);
    assert_eq!(v["defect"], 0);
    let v: Value = serde_json::from_slice(&rotwalk(&["check", &eq1, "--criterion", "involution"]).stdout).unwrap();
    assert_eq!(v["consistent"], false);
    assert_eq!(v["defect"], 0);

    let greedy = w.write("greedy.rot", "4 2\n2 4\n1 3\n2 4\n1 3\n");
    let o = rotwalk(&["check", &greedy, "--emit-product"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["consistent"], false);
    let product: Vec<Vec<i64>> = serde_json::from_value(v["product"].clone()).unwrap();
    let diag = [2, 2, 0, 0, 0, 0, 2, 2];
    for (i, row) in product.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            assert_eq!(x, if i == j { diag[i] } else { 0 });
        }
    }
    // Violations are 1-based: vertex 1 appears twice in label 1.
    let first = &v["violations"][0];
    assert_eq!((first["label"].as_u64(), first["vertex"].as_u64(), first["count"].as_u64()), (Some(1), Some(1), Some(2)));

    let k2 = w.write("k2.rot", "2 1\n2\n1\n");
    let v: Value = serde_json::from_slice(&rotwalk(&["check", &k2]).stdout).unwrap();
    assert_eq!(v["consistent"], true);

    assert_eq!(code(&rotwalk(&["check", &s(&w.path("missing.rot"))])), 2);
    let junk = w.write("junk.rot", "4 2\n2 x\n");
    assert_eq!(code(&rotwalk(&["check", &junk])), 2);
}

#[test]
fn solve_outcomes_and_exit_codes() {
    let w = Work::new();
    let sq = w.write("sq.txt", "4 2\n1 2\n2 3\n3 4\n1 4\n");
    let out = s(&w.path("sq.rot"));
    let stats = s(&w.path("sq.json"));
    let o = rotwalk(&["solve", &sq, "--criterion", "involution", "--method", "exhaustive", "--out", &out, "--stats", &stats]);
    assert_eq!(code(&o), 0);
    let st: Value = serde_json::from_str(&w.read("sq.json")).unwrap();
    assert_eq!(st["status"], "solved");
    let v: Value = serde_json::from_slice(&rotwalk(&["check", &out, "--criterion", "involution"]).stdout).unwrap();
    assert_eq!(v["consistent"], true);

    let pe = w.write("petersen.txt", PETERSEN);
    let stats = s(&w.path("pe.json"));
    let o = rotwalk(&["solve", &pe, "--method", "exhaustive", "--stats", &stats]);
    assert_eq!(code(&o), 3);
    assert!(o.stdout.is_empty());
    let st: Value = serde_json::from_str(&w.read("pe.json")).unwrap();
    assert_eq!(st["status"], "infeasible-proven");

    let o = rotwalk(&["solve", &pe, "--method", "local-search", "--max-iterations", "500", "--max-restarts", "1", "--stats", &stats]);
    assert_eq!(code(&o), 3);
    let st: Value = serde_json::from_str(&w.read("pe.json")).unwrap();
    assert_eq!(st["status"], "budget-exhausted");
    assert!(st["best_conflicts"].as_u64().unwrap() > 0);

    let rr = w.write("rr.txt", &stdout(&rotwalk(&["gen", "random-regular", "80", "12", "--seed", "7"])));
    let out = s(&w.path("rr.rot"));
    let o = rotwalk(&["solve", &rr, "--criterion", "permutation", "--method", "matching", "--out", &out]);
    assert_eq!(code(&o), 0);
    let st: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(st["status"], "solved");
    let v: Value = serde_json::from_slice(&rotwalk(&["check", &out]).stdout).unwrap();
    assert_eq!((v["consistent"].clone(), v["defect"].clone()), (Value::Bool(true), Value::from(0)));

    // Method and criterion that do not fit together.
    assert_eq!(code(&rotwalk(&["solve", &sq, "--criterion", "involution", "--method", "matching"])), 2);
}

#[test]
fn shift_dump() {
    let w = Work::new();
    let eq1 = w.write("eq1.rot", SQUARE_CONSISTENT);
    let o = rotwalk(&["shift", &eq1]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ordering"], "coin-major");
    let m = v["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 8);
    // (up,1) -> (up,2): column 0, row 1.
    assert_eq!(m[1][0][0], 1.0);
    for row in m {
        let ones = row.as_array().unwrap().iter().filter(|x| x[0] == 1.0).count();
        assert_eq!(ones, 1);
    }
}

#[test]
fn walk_runs_and_guards() {
    let w = Work::new();
    let sq = w.write("sq.txt", "4 2\n1 2\n2 3\n3 4\n1 4\n");
    let eq1 = w.write("eq1.rot", SQUARE_CONSISTENT);
    let o = rotwalk(&["walk", &sq, &eq1, "--coin", "hadamard", "--steps", "1", "--start", "1,1"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<Vec<f64>> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let after: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] == 1.0).collect();
    let probs: Vec<f64> = after.iter().map(|r| r[2]).collect();
    for (p, want) in probs.iter().zip([0.0, 0.5, 0.0, 0.5]) {
        assert!((p - want).abs() < 1e-12, "{probs:?}");
    }
    assert!(after.iter().all(|r| (r[3] - 1.0).abs() < 1e-12));

    let greedy = w.write("greedy.rot", "4 2\n2 4\n1 3\n2 4\n1 3\n");
    let o = rotwalk(&["walk", &sq, &greedy]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("permutation"));

    let o = rotwalk(&["walk", &sq, &greedy, "--allow-inconsistent", "--coin", "identity", "--steps", "3", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let norms: Vec<f64> = v["records"].as_array().unwrap().iter().map(|r| r["norm2"].as_f64().unwrap()).collect();
    assert_eq!(norms.len(), 4);
    assert!((norms[0] - 1.0).abs() < 1e-12);
    assert!(norms[1..].iter().all(|x| (x - 2.0).abs() < 1e-12));

    for start in ["0,1", "1,5", "1", "1,1,x,0", "1,1,0,0"] {
        assert_eq!(code(&rotwalk(&["walk", &sq, &eq1, "--start", start])), 2, "{start}");
    }
    let o = rotwalk(&["walk", &sq, &eq1, "--coin", "grover", "--start", "1,1,1,0; 2,3,0,1", "--steps", "4"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn pipeline_is_reproducible() {
    let run_pipeline = |w: &Work| -> Vec<String> {
        let g = s(&w.path("g.txt"));
        let m = s(&w.path("m.rot"));
        let c = s(&w.path("c.json"));
        let t = s(&w.path("t.csv"));
        let st = s(&w.path("stats.json"));
        assert_eq!(code(&rotwalk(&["gen", "random-regular", "30", "4", "--seed", "11", "--out", &g])), 0);
        assert_eq!(code(&rotwalk(&["solve", &g, "--seed", "3", "--out", &m, "--stats", &st])), 0);
        assert_eq!(code(&rotwalk(&["check", &m, "--criterion", "involution", "--out", &c])), 0);
        assert_eq!(code(&rotwalk(&["walk", &g, &m, "--coin", "dft", "--steps", "25", "--start", "2,7", "--out", &t])), 0);
        ["g.txt", "m.rot", "c.json", "t.csv"].iter().map(|f| w.read(f)).collect()
    };
    let (a, b) = (Work::new(), Work::new());
    assert_eq!(run_pipeline(&a), run_pipeline(&b));
}
