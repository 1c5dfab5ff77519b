// SPDX-License-Identifier: Apache-2.0

use mipreopt::model::random::multi_knapsack;
use mipreopt::model::write_instance;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mipreopt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_run_score() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.json");
    write_instance(&multi_knapsack(12, 2, 4), &base).unwrap();
    let series = dir.path().join("series");
    let out = bin(&[
        "generate",
        "--base",
        p(&base),
        "--kind",
        "rhs",
        "--count",
        "12",
        "--seed",
        "5",
        "--out",
        p(&series),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest = series.join("manifest.json");
    assert!(manifest.exists());

    let run = |name: &str, extra: &[&str]| {
        let dest = dir.path().join(name);
        let mut args = vec![
            "run",
            "--manifest",
            p(&manifest),
            "--out",
            p(&dest),
            "--det-clock",
            "1000",
        ];
        args.extend_from_slice(extra);
        let out = bin(&args);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        dest
    };
    let full = run("full", &[]);
    let again = run("again", &[]);
    let base_run = run(
        "base",
        &[
            "--disable",
            "hints",
            "--disable",
            "history",
            "--disable",
            "sb",
            "--disable",
            "tuning",
            "--disable",
            "turnoff",
        ],
    );
    let csv = |d: &Path| std::fs::read_to_string(d.join("report.csv")).unwrap();
    assert_eq!(csv(&full), csv(&again));
    assert!(full.join("summary.json").exists());
    assert_eq!(csv(&base_run).lines().count(), 13);

    let out = bin(&["score", "--report", p(&full), "--baseline", p(&base_run)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("1-10") && text.contains("11-12") && text.contains("all"),
        "{text}"
    );
}

#[test]
fn bad_arguments_fail() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert!(
        !bin(&["run", "--manifest", p(&missing), "--out", p(dir.path())])
            .status
            .success()
    );
    assert!(!bin(&[
        "run",
        "--manifest",
        p(&missing),
        "--out",
        p(dir.path()),
        "--det-clock",
        "-1"
    ])
    .status
    .success());
    assert!(!bin(&[
        "generate",
        "--base",
        p(&missing),
        "--count",
        "3",
        "--out",
        p(dir.path())
    ])
    .status
    .success());
}
