use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

const HEADER: &str = "algorithm,N,r,k,seed,trial,success,f_queries,g_queries,total_queries,table_space";

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_collision-sim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_expected_csv() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("bht.csv");
    let o = cli(&[
        "run", "--algo", "bht", "--n", "4096", "--r", "2", "--k-policy", "cube-root", "--trials", "20",
        "--seed", "7", "--out", path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|l| l.starts_with("bht,4096,2,13,")));
}

#[test]
fn sweep_is_deterministic() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = cli(&[
            "sweep", "--algo", "claw-r", "--n-grid", "1024,4096", "--r", "2", "--trials", "15", "--seed",
            "3", "--out", path(out),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn analyze_reads_sweep_output() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("k.csv");
    let o = cli(&[
        "sweep", "--algo", "bht", "--n-grid", "16384", "--k-grid", "4,8,16,32,64", "--trials", "30",
        "--seed", "1", "--out", path(&out),
    ]);
    assert!(o.status.success());
    for kind in ["optimal-k", "tradeoff"] {
        let o = cli(&["analyze", kind, "--in", path(&out)]);
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = cli(&["analyze", "scaling", "--in", path(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_config_exits_one() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = cli(&["run", "--algo", "bht", "--n", "1001", "--r", "2", "--trials", "5", "--seed", "0", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let o = cli(&["run", "--algo", "nope", "--n", "64", "--trials", "5", "--seed", "0", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_analysis_input_exits_two() {
    let dir = tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(cli(&["analyze", "scaling", "--in", path(&missing)]).status.code(), Some(2));
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "a,b,c\n1,2,3\n").unwrap();
    assert_eq!(cli(&["analyze", "tradeoff", "--in", path(&bad)]).status.code(), Some(2));
}
