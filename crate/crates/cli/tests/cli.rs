use std::path::Path;
use std::process::{Command, Output};

use qswitch_core::harness::{preset_ghz3, preset_spin32, ExperimentConfig};
use qswitch_core::switching::PolicyKind;

fn qswitch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qswitch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write_config(dir: &Path, name: &str, cfg: &ExperimentConfig) -> String {
    let path = dir.join(name);
    std::fs::write(&path, cfg.to_json().unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn small_ghz() -> ExperimentConfig {
    let mut cfg = preset_ghz3();
    cfg.n_steps = 400;
    cfg.n_trajectories = 3;
    cfg.a2_samples = 200;
    cfg.open_loop_compare = false;
    cfg.fit_window = [0.0, 1.0];
    cfg
}

#[test]
fn presets_round_trip_through_json() {
    for (name, want) in [("ghz3", preset_ghz3()), ("spin32", preset_spin32())] {
        let out = qswitch(&["preset", name]);
        assert!(out.status.success());
        let cfg = ExperimentConfig::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
        assert_eq!(cfg, want);
    }
    let out = qswitch(&["preset", "nonexistent"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_and_certify_report_through_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let ghz = write_config(tmp.path(), "ghz.json", &small_ghz());
    let out = qswitch(&["check", &ghz]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert!(report["invariance"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["invariant"] == true));

    let out = qswitch(&["certify", &ghz]);
    assert_eq!(out.status.code(), Some(0));
    let cert = stdout_json(&out);
    let c = cert["c"].as_f64().unwrap();
    assert!((c - 0.046585).abs() < 1e-5, "c = {c}");
    assert!(cert["t_d"].as_f64().unwrap() > 0.0);
    assert!(cert["m_bar"].as_f64().unwrap() > 0.0);

    let mut refused = preset_spin32();
    refused.policy.kind = PolicyKind::Sigma1;
    let spin = write_config(tmp.path(), "spin_sigma1.json", &refused);
    let out = qswitch(&["check", &spin]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("checks: FAIL"));

    let out = qswitch(&["check", &tmp.path().join("missing.json").to_string_lossy()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_then_exponent_on_the_run_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "ghz.json", &small_ghz());
    let dir = tmp.path().join("run");
    let dir_s = dir.to_string_lossy().into_owned();
    let out = qswitch(&[
        "run",
        &cfg,
        "--seed",
        "5",
        "--trajectories",
        "2",
        "--policy",
        "sigma4",
        "--out",
        &dir_s,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    assert_eq!(summary["n_trajectories"], 2);
    assert_eq!(summary["policy"], "sigma4");
    for f in [
        "summary.csv",
        "manifest.json",
        "events_0.csv",
        "events_1.csv",
        "traj_0.csv",
        "timing.json",
    ] {
        assert!(dir.join(f).exists(), "missing {f}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 5);
    assert_eq!(manifest["base_seed"], 5);

    let out = qswitch(&["exponent", &dir_s]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let est = stdout_json(&out);
    let refit = est["slope"].as_f64().unwrap();
    let recorded = summary["exponent"]["slope"].as_f64().unwrap();
    assert!(
        (refit - recorded).abs() <= 1e-12 * recorded.abs(),
        "{refit} vs {recorded}"
    );
}

#[test]
fn policy_override_on_a_non_invariant_bank_exits_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let mut spin = preset_spin32();
    spin.n_steps = 10;
    spin.n_trajectories = 1;
    let cfg = write_config(tmp.path(), "spin.json", &spin);
    let out = qswitch(&[
        "run",
        &cfg,
        "--policy",
        "sigma1",
        "--out",
        &tmp.path().join("run").to_string_lossy(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("target invariance"), "{err}");
    assert!(!tmp.path().join("run/summary.csv").exists());
}
