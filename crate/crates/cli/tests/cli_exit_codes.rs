//! The `qready` binary's exit codes and output files.

use std::path::Path;
use std::process::{Command, Output};

const TOY: &str = "2 3\n1 1 1\n1 2 -2\n2 2 1\n";

fn qready(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qready")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_writes_results_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "toy.txt", TOY);
    let out = dir.path().join("out");
    let run = qready(&["solve", &file, "--time-limit", "0.2", "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    for name in ["results.json", "report.csv", "report.json", "time-markers.svg"] {
        assert!(out.join(name).is_file(), "{name}");
    }

    let analyzed = dir.path().join("div");
    let run = qready(&["analyze", out.join("results.json").to_str().unwrap(), "--out", analyzed.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(std::fs::read_dir(&analyzed).unwrap().count() > 0);
}

#[test]
fn malformed_input_exits_two_with_the_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "bad.txt", "2 2\n1 2 1\n");
    let run = qready(&["solve", &file, "--time-limit", "0.1"]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("line 2"));

    assert_eq!(qready(&["solve", &file, "--time-limit", "-1"]).status.code(), Some(2));
    assert_eq!(qready(&["solve", "/nonexistent/file"]).status.code(), Some(2));
    assert_eq!(qready(&["bogus-command"]).status.code(), Some(2));
}

#[test]
fn bench_with_a_missing_instance_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "toy.txt", "3 3\n1 2 1\n2 3 1\n1 3 1\n");
    let out = dir.path().join("out");
    let run = qready(&[
        "bench",
        "--instances-dir",
        dir.path().to_str().unwrap(),
        "--repeats",
        "2",
        "--time-limit",
        "0.1",
        "--out",
        out.to_str().unwrap(),
        "toy",
        "missing",
    ]);
    assert_eq!(run.status.code(), Some(3), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.contains("missing"));
}
