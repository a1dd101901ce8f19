//! End-to-end checks of the binary: exit codes, report files, determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("viscolab-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_viscolab"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn small_grid_run_passes_and_writes_summary() {
    let dir = scratch("jets");
    let out = dir.join("report");
    let res = run(&["boundary-jets", "--resolution", "8,24", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], serde_json::Value::Bool(true));
    assert_eq!(summary["kind"], "boundary-jets");
    assert!(out.join("timings.json").exists());
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = scratch("badkey");
    let cfg = dir.join("bad.ini");
    fs::write(&cfg, "[experiment]\nbogus = 1\n").unwrap();
    let res = run(&[
        "boundary-jets",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("report").to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("bogus"), "stderr should name the key: {err}");
}

#[test]
fn out_of_range_resolution_is_a_usage_error() {
    let dir = scratch("badres");
    for bad in ["30x200", "8x9", "abc"] {
        let res = run(&[
            "forward-stokes",
            "--resolution",
            bad,
            "--out",
            dir.join("report").to_str().unwrap(),
        ]);
        assert_eq!(res.status.code(), Some(2), "resolution {bad}");
    }
}

#[test]
fn summary_is_byte_identical_across_runs() {
    let dir = scratch("determinism");
    let (a, b) = (dir.join("a"), dir.join("b"));
    for out in [&a, &b] {
        let res = run(&["forward-stokes", "--resolution", "8,24", "--out", out.to_str().unwrap()]);
        assert_eq!(res.status.code(), Some(0));
    }
    let left = fs::read(a.join("summary.json")).unwrap();
    let right = fs::read(b.join("summary.json")).unwrap();
    assert_eq!(left, right);
}
