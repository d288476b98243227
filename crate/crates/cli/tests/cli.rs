//! Black-box tests of the `backaction` binary: exit codes, output files,
//! and config handling.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn backaction(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_backaction"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

const SMALL: &str = r#"
[physics]
sites = 3
atoms = 3
interaction = 0.05

[trajectory]
events = 50
dt = 0.0
seed = 3

[ensemble]
runs = 20
bins = 60
master_seed = 11
"#;

#[test]
fn classes_succeeds_and_creates_missing_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = dir.path().join("deep/nested/out");
    let result = backaction(&["classes", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    assert!(out.join("classes.csv").exists());
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("classes=4"), "{stdout}");
}

#[test]
fn invalid_config_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[physics]\natoms = 0\n");
    let result = backaction(&["ground-state", "--config", &config]);
    assert_eq!(result.status.code(), Some(2), "{}", String::from_utf8_lossy(&result.stderr));
}

#[test]
fn unknown_config_key_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[physics]\nsize = 3\n");
    let result = backaction(&["classes", "--config", &config]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn excessive_coupling_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[scattering]\ncoupling = 0.9\n");
    let result = backaction(&["ground-state", "--config", &config]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("coupling"), "{stderr}");
}

#[test]
fn single_event_trajectory_logs_one_event() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[trajectory]\nevents = 1\nseed = 5\n[ensemble]\nbins = 30\n",
    );
    let out = dir.path().join("out");
    let result =
        backaction(&["trajectory", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success());
    let events = fs::read_to_string(out.join("events.csv")).unwrap();
    let data_rows: Vec<&str> = events
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("index"))
        .collect();
    assert_eq!(data_rows.len(), 1);
}

#[test]
fn snapshot_stride_zero_writes_no_snapshot_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let result =
        backaction(&["trajectory", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success());
    assert!(!out.join("snapshots.csv").exists());
}

#[test]
fn config_echo_reloads_identically() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let result = backaction(&["classes", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success());

    // the echoed config must reproduce the run byte-for-byte
    let echo = out.join("config_echo.toml");
    assert!(echo.exists());
    let out2 = dir.path().join("out2");
    let result = backaction(&[
        "classes",
        "--config",
        echo.to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let first = fs::read_to_string(out.join("classes.csv")).unwrap();
    let second = fs::read_to_string(out2.join("classes.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn reruns_with_the_same_seed_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for out in [&out1, &out2] {
        let result = backaction(&[
            "ensemble",
            "--config",
            &config,
            "--seed",
            "77",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    }
    for name in ["histogram.csv", "runs.csv", "comparison.csv", "end_states.csv"] {
        let a = fs::read(out1.join(name)).unwrap();
        let b = fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn format_flag_limits_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let result = backaction(&[
        "ensemble",
        "--config",
        &config,
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    assert!(out.join("comparison.json").exists());
    assert!(!out.join("histogram.csv").exists());
    assert!(!out.join("ensemble_overlay.svg").exists());
}

#[test]
fn amplitude_file_supplies_the_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    // equal superposition of |201> (index 2) and |102> (index 5)
    let amplitudes = dir.path().join("state.csv");
    fs::write(&amplitudes, "basis_index,re,im\n2,1.0,0.0\n5,1.0,0.0\n").unwrap();
    let config = write_config(
        dir.path(),
        &format!(
            "{SMALL}\n[initial_state]\namplitudes = {:?}\n",
            amplitudes.display().to_string()
        ),
    );
    let out = dir.path().join("out");
    let result = backaction(&["ensemble", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    // both members of the class share a pattern, so every run must end in
    // that class: end_states.csv shows frequency 1 for class 2
    let end_states = fs::read_to_string(out.join("end_states.csv")).unwrap();
    let class_row: Vec<&str> = end_states
        .lines()
        .filter(|l| !l.starts_with('#') && l.starts_with("2,"))
        .collect();
    assert_eq!(class_row.len(), 1);
    let fields: Vec<&str> = class_row[0].split(',').collect();
    assert_eq!(fields[3], "1", "frequency column: {}", class_row[0]);
}

#[test]
fn svg_outputs_are_self_contained() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let result =
        backaction(&["ground-state", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success());
    let svg = fs::read_to_string(out.join("predicted_curve.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(!svg.contains("href"), "external reference in SVG");
}
