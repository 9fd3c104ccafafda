//! Helpers for driving the `crad` binary from test targets.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

pub fn crad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crad"))
        .args(args)
        .env_remove("CRAD_JOBS")
        .output()
        .expect("binary runs")
}

pub fn ok(args: &[&str]) -> String {
    let out = crad(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn gen_blobs(dir: &TempDir) -> PathBuf {
    let data = path(dir, "blobs.csv");
    ok(&[
        "gen",
        "gaussians",
        "--seed",
        "3",
        "--centers",
        "0,0;10,0;5,9",
        "--scales",
        "0.8,0.8,0.8",
        "--counts",
        "40,40,40",
        "--out",
        s(&data),
    ]);
    data
}

/// Runs every pipeline, a sweep and a plot; returns the bytes of each output.
pub fn run_all(data: &Path, dir: &TempDir, tag: &str, jobs: &str) -> Vec<Vec<u8>> {
    let runs: [&[&str]; 5] = [
        &["--algo", "crad", "--nbin", "40", "--step", "1"],
        &["--algo", "crad", "--auto"],
        &[
            "--algo",
            "crad-dbscan",
            "--nbin",
            "40",
            "--step",
            "1",
            "--min-pts",
            "3",
        ],
        &["--algo", "dbca", "--theta", "0.9"],
        &["--algo", "dbscan", "--eps", "1.5", "--min-pts", "3"],
    ];
    let mut files = Vec::new();
    for (k, extra) in runs.iter().enumerate() {
        let labels = path(dir, &format!("{tag}-{k}.csv"));
        let mut args = vec![
            "--jobs",
            jobs,
            "cluster",
            s(data),
            "--seed",
            "11",
            "--out",
            s(&labels),
        ];
        args.extend_from_slice(extra);
        ok(&args);
        files.push(fs::read(&labels).unwrap());
    }
    let sweep = path(dir, &format!("{tag}-sweep.csv"));
    let json = ok(&[
        "--jobs",
        jobs,
        "sweep",
        s(data),
        "--grid",
        "20:80:10",
        "--seed",
        "11",
        "--labels",
        s(&sweep),
    ]);
    files.push(json.into_bytes());
    files.push(fs::read(&sweep).unwrap());
    let svg = path(dir, &format!("{tag}.svg"));
    let first_labels = path(dir, &format!("{tag}-0.csv"));
    ok(&["plot", s(data), s(&first_labels), "--out", s(&svg)]);
    files.push(fs::read(&svg).unwrap());
    files
}
