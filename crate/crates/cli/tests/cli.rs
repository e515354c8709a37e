use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn snlw(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snlw"))
        .args(args)
        .current_dir(dir)
        .env_remove("SNLW_OUT_DIR")
        .output()
        .expect("binary runs")
}

const QUIET: &str = r#"
schema_version = 1
[grid]
dim = 3
modes = 3
[time]
h = 0.002
horizon = 0.2
[initial]
kind = "bump"
amplitude = 0.5
width = 0.7
[ensemble]
n_traj = 2
"#;

/// Zero mode forced, kick off: the mean energy grows at half the squared
/// Hilbert–Schmidt norm.
const SINGLE_MODE: &str = r#"
schema_version = 1
[grid]
dim = 3
modes = 1
[time]
h = 0.01
horizon = 1.0
[equation]
nonlinear = false
[noise]
kind = "table"
modes = [{ n = [0, 0, 0], value = 1.0 }]
[ensemble]
n_traj = 200
"#;

fn setup(config: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), config).unwrap();
    dir
}

#[test]
fn simulate_writes_trajectory() {
    let dir = setup(QUIET);
    let out = snlw(&["simulate", "--config", "c.toml", "--seed", "7", "--out", "run"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("run");
    assert!(run.join("traj_00000.csv").exists());
    assert!(!run.join("traj_00001.csv").exists());
    let summary = fs::read_to_string(run.join("summary.json")).unwrap();
    assert!(summary.contains("\"base_seed\": 7"));
}

#[test]
fn ito_check_exit_status_follows_verdict() {
    let dir = setup(QUIET);
    let out = snlw(&["ito-check", "--config", "c.toml", "--check", "--out", "a"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(dir.path().join("a/verdict.json").exists());

    let dir = setup(SINGLE_MODE);
    let out = snlw(&["ito-check", "--config", "c.toml", "--check", "--out", "b"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(1), "{stdout}");
    assert!(stdout.contains("verdict: FAIL"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("b/verdict.json")).unwrap()).unwrap();
    assert!(v["z"].as_f64().unwrap().abs() > 3.0);
    // without --check the verdict is reported but not enforced
    let out = snlw(&["ito-check", "--config", "c.toml", "--out", "b"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn unknown_subcommand_prints_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = snlw(&["bogus"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    let out = snlw(&["simulate", "--frobnicate"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn missing_or_invalid_config_fails() {
    let dir = setup(&QUIET.replace("h = 0.002", "h = 0.0"));
    let out = snlw(&["simulate"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = snlw(&["simulate", "--config", "c.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("time.h"));
}

#[test]
fn output_directory_from_environment() {
    let dir = setup(QUIET);
    let out = Command::new(env!("CARGO_BIN_EXE_snlw"))
        .args(["ensemble", "--config", "c.toml", "--workers", "2"])
        .current_dir(dir.path())
        .env("SNLW_OUT_DIR", "env-out")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("env-out/ledger.csv").exists());
    assert!(dir.path().join("env-out/traj_00001.csv").exists());
}

#[test]
fn report_after_ensemble() {
    let dir = setup(QUIET);
    assert!(snlw(&["ensemble", "--config", "c.toml", "--out", "r"], dir.path()).status.success());
    let out = snlw(&["report", "--out", "r"], dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("[summary.json]"));
    assert!(dir.path().join("r/report.txt").exists());
    assert!(dir.path().join("r/report.csv").exists());
    assert_eq!(snlw(&["report", "--out", "nothing-here"], dir.path()).status.code(), Some(2));
}

#[test]
fn study_subcommands_write_tables() {
    let config = format!(
        "{}\n[studies]\ntruncation_modes = [2, 4]\nperturbation_epsilons = [0.001, 0.01, 0.1]\n",
        QUIET
            .replace("[initial]", "[noise]\nkind = \"power_decay\"\nalpha = 2.0\n[initial]")
            .replace("amplitude = 0.5", "amplitude = 0.01")
    );
    let dir = setup(&config);
    for (cmd, file) in [("truncation", "truncation.csv"), ("lwp", "lwp.csv"), ("perturbation", "perturbation.csv")] {
        let out = snlw(&[cmd, "--config", "c.toml", "--out", "s"], dir.path());
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(dir.path().join("s").join(file).exists(), "{file}");
    }
    // regularity needs at least eight modes
    assert_eq!(snlw(&["regularity", "--config", "c.toml", "--out", "s"], dir.path()).status.code(), Some(2));
    let dir = setup(&config.replace("modes = 3", "modes = 8"));
    let out = snlw(&["regularity", "--config", "c.toml", "--out", "s", "--check"], dir.path());
    assert!(dir.path().join("s/regularity.csv").exists());
    assert!(out.status.code().is_some_and(|c| c <= 1));
}
