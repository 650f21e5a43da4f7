//! End-to-end checks of the `ramlab` binary: byte-deterministic reports on
//! the golden job files and the exit-code contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ramlab")
}

fn jobs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../jobs")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

#[test]
fn golden_jobs_are_byte_deterministic_and_verify() {
    let dir = jobs_dir();
    let mut jobs: Vec<PathBuf> = std::fs::read_dir(&dir)
        .expect("jobs directory exists")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "job"))
        .collect();
    jobs.sort();
    assert!(jobs.len() >= 6, "expected the golden job corpus in {:?}", dir);
    for job in &jobs {
        let job_str = job.to_str().unwrap();
        let first = run(&["run", job_str]);
        let second = run(&["run", job_str]);
        assert_eq!(
            first.status.code(),
            Some(0),
            "{}: stderr: {}",
            job_str,
            String::from_utf8_lossy(&first.stderr)
        );
        assert_eq!(second.status.code(), Some(0));
        assert_eq!(
            first.stdout, second.stdout,
            "{} produced different bytes on a second run",
            job_str
        );
        let text = String::from_utf8(first.stdout).unwrap();
        assert!(text.contains("\"all_verified\": true"), "{}", job_str);
        assert!(text.ends_with('\n'));
    }
}

#[test]
fn json_flag_writes_the_same_bytes() {
    let job = jobs_dir().join("nf-kummer-sim.job");
    let out_path = std::env::temp_dir().join("ramlab-cli-test-sim.json");
    let _ = std::fs::remove_file(&out_path);
    let out = run(&["run", job.to_str().unwrap(), "--json", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read(&out_path).expect("report written");
    assert_eq!(out.stdout, written);
    let _ = std::fs::remove_file(&out_path);
}

#[test]
fn malformed_job_exits_2_with_position() {
    let path = std::env::temp_dir().join("ramlab-cli-test-bad.job");
    std::fs::write(&path, "[model]\nkind = padic\n\n[task]\nkind = mystery\n").unwrap();
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "missing position annotation: {}", err);
    let _ = std::fs::remove_file(&path);

    let out = run(&["run", "/nonexistent/job/file.job"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn computation_error_exits_3() {
    // the x^2 coefficient 8 has odd valuation: no square root exists and
    // the reduction reports a structured failure
    let path = std::env::temp_dir().join("ramlab-cli-test-comp.job");
    std::fs::write(
        &path,
        "[model]\nkind = padic\np = 2\n\n[stream]\nambient = 46420133 @prec 2^64\n\n\
         [task]\nkind = nf-kummer\nf = 8*x^2\n",
    )
    .unwrap();
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    let _ = std::fs::remove_file(&path);
}

#[test]
fn verify_subcommand_runs_suites() {
    let first = run(&["verify", "--suite", "delta", "--seed", "1", "--size", "100"]);
    assert_eq!(
        first.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&first.stderr)
    );
    let second = run(&["verify", "--suite", "delta", "--seed", "1", "--size", "100"]);
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("\"passed\": 100"));

    let out = run(&["verify", "--suite", "mystery"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}
