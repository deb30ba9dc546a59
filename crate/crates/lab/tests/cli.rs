//! Runs the installed binary end to end.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fockgibbs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fockgibbs")).args(args).output().expect("binary runs")
}

fn run_partition(out: &Path, threads: &str) -> String {
    let o = fockgibbs(&["partition", "--out", out.to_str().unwrap(), "--seed", "7", "--threads", threads]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    fs::read_to_string(out.join("partition.csv")).unwrap()
}

#[test]
fn unknown_subcommand_exits_one() {
    let o = fockgibbs(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn bad_config_exits_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "tau = []\n").unwrap();
    let out = dir.path().join("out");
    let o = fockgibbs(&["partition", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tau"));
    assert!(!out.exists());
}

#[test]
fn partition_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let one = run_partition(&dir.path().join("a"), "1");
    let four = run_partition(&dir.path().join("b"), "4");
    assert!(one.starts_with("tau,q_ratio,c_value,c_stderr,abs_diff\n"), "{one}");
    assert_eq!(one.lines().count(), 4);
    assert_eq!(one, four);
    let manifest = fs::read_to_string(dir.path().join("a/partition_manifest.toml")).unwrap();
    assert!(manifest.contains("seed = 7"), "{manifest}");
}

#[test]
fn selftest_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = fockgibbs(&["selftest", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(dir.path().join("selftest.csv").exists());
}
