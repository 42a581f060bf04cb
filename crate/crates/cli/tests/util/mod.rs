//! Helpers shared by the CLI integration suites.
// Each test target compiles its own copy, so not every helper is used in
// every target.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn ftcal<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_ftcal")).args(args).output().expect("ftcal binary launches")
}

pub fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "\nstdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

pub fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

pub fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&output.stdout))
    })
}

/// Generate a preset into `dir` and return the dataset CSV paths in label
/// order (dataset1..dataset8).
pub fn synth(dir: &Path, preset: &str, seed: u64, noise: f64) -> Vec<PathBuf> {
    let out = ftcal([
        "synth",
        "--preset",
        preset,
        "--seed",
        &seed.to_string(),
        "--noise",
        &noise.to_string(),
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    (1..=8).map(|i| dir.join(format!("dataset{i}.csv"))).collect()
}

pub fn path_args(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| p.to_str().unwrap().to_string()).collect()
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).expect("file exists")).expect("valid JSON")
}
