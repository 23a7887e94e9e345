#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_corrnet")
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn panel() -> PathBuf {
    manifest_dir().join("tests/fixtures/synthetic_panel.csv")
}

pub fn attrs() -> PathBuf {
    manifest_dir().join("../core/data/attributes_2020.csv")
}

pub fn golden_dir() -> PathBuf {
    manifest_dir().join("tests/golden")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env_remove("CORRNET_OUT")
        .output()
        .expect("spawn corrnet")
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "corrnet {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Data rows of a CSV artifact (header comment and column header skipped).
pub fn data_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(str::to_string)
        .collect()
}

/// Runs the end-to-end pipeline on the bundled panel into `out`.
pub fn pipeline(out: &Path) {
    let panel = panel();
    let attrs = attrs();
    let (p, a, o) = (
        panel.to_str().unwrap(),
        attrs.to_str().unwrap(),
        out.to_str().unwrap(),
    );
    run_ok(&["summary", "--input", p, "--out", o]);
    run_ok(&["rolling", "--input", p, "--out", o]);
    run_ok(&[
        "network",
        "--input",
        p,
        "--out",
        o,
        "--window-end",
        "2020-02-11",
    ]);
    run_ok(&[
        "ergm",
        "--input",
        p,
        "--attrs",
        a,
        "--out",
        o,
        "--window-end",
        "2020-02-11",
        "--method",
        "mst",
        "--nsim",
        "2000",
        "--seed",
        "7",
    ]);
}

/// Compares every file under `out` with the golden copy. With `update`, the
/// golden directory is rewritten instead.
pub fn compare_golden(out: &Path, update: bool) -> Vec<String> {
    let golden = golden_dir();
    let mut names: Vec<String> = fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    if update {
        fs::create_dir_all(&golden).unwrap();
        for n in &names {
            fs::copy(out.join(n), golden.join(n)).unwrap();
        }
        return Vec::new();
    }
    let mut problems = Vec::new();
    let mut expected: Vec<String> = fs::read_dir(&golden)
        .map(|it| {
            it.map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
                .collect()
        })
        .unwrap_or_default();
    expected.sort();
    if expected != names {
        problems.push(format!(
            "file set differs: got {names:?}, golden {expected:?}"
        ));
    }
    for n in names.iter().filter(|n| expected.contains(n)) {
        if fs::read(out.join(n)).unwrap() != fs::read(golden.join(n)).unwrap() {
            problems.push(format!("{n} differs from golden copy"));
        }
    }
    problems
}
