use std::collections::BTreeMap;
use std::path::Path;

use qswitch_core::harness::{
    mean_std, preset_ghz3, preset_spin32, read_summary_csv, run_experiment, ExperimentConfig, GeneratorSpec,
};
use qswitch_core::operator::zeros;
use qswitch_core::switching::{read_events_csv, PolicyKind};
use qswitch_core::Error;

fn small_ghz(kind: PolicyKind) -> ExperimentConfig {
    let mut cfg = preset_ghz3();
    cfg.policy.kind = kind;
    cfg.n_steps = 600;
    cfg.n_trajectories = 5;
    cfg.a2_samples = 200;
    cfg.open_loop_compare = kind == PolicyKind::Sigma3;
    cfg.fit_window = [0.0, 1.0];
    cfg
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "timing.json")
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect()
}

#[test]
fn outputs_are_byte_identical_across_reruns_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    for kind in [PolicyKind::Sigma1, PolicyKind::Sigma3, PolicyKind::Sigma4] {
        let mut cfg = small_ghz(kind);
        let mut outputs = Vec::new();
        for (run, threads) in [Some(1), Some(3), Some(1)].into_iter().enumerate() {
            cfg.threads = threads;
            let dir = tmp.path().join(format!("{kind}_{run}"));
            run_experiment(&cfg, Some(&dir)).unwrap();
            outputs.push(files(&dir));
        }
        // the config echo differs only in the thread count
        for o in &mut outputs {
            o.remove("manifest.json");
        }
        assert!(outputs[0].contains_key("summary.csv"));
        assert_eq!(outputs[0], outputs[1], "{kind}: thread count changed the output");
        assert_eq!(outputs[0], outputs[2], "{kind}: rerun changed the output");
    }
    let a = std::fs::read(tmp.path().join("sigma1_0/manifest.json")).unwrap();
    let b = std::fs::read(tmp.path().join("sigma1_2/manifest.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn summary_recomputes_from_trajectory_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_ghz(PolicyKind::Sigma4);
    run_experiment(&cfg, Some(tmp.path())).unwrap();
    let summary = read_summary_csv(&tmp.path().join("summary.csv")).unwrap();
    let mut ds: Vec<Vec<f64>> = Vec::new();
    let mut trk: Vec<Vec<f64>> = Vec::new();
    for i in 0..cfg.n_trajectories {
        let mut r = csv::Reader::from_path(tmp.path().join(format!("traj_{i}.csv"))).unwrap();
        let rows: Vec<(f64, f64, f64, usize, f64, f64)> = r.deserialize().map(|x| x.unwrap()).collect();
        assert_eq!(rows.len(), summary.t.len());
        for (row, t) in rows.iter().zip(&summary.t) {
            assert_eq!(row.0, *t);
            assert!((1..=2).contains(&row.3));
        }
        ds.push(rows.iter().map(|r| r.1).collect());
        trk.push(rows.iter().map(|r| r.2).collect());
    }
    for i in 0..summary.t.len() {
        let (m, s) = mean_std(&ds.iter().map(|x| x[i]).collect::<Vec<_>>());
        assert!((m - summary.mean_ds[i]).abs() <= 1e-12 && (s - summary.std_ds[i]).abs() <= 1e-12);
        let (m, s) = mean_std(&trk.iter().map(|x| x[i]).collect::<Vec<_>>());
        assert!((m - summary.mean_trk[i]).abs() <= 1e-12 && (s - summary.std_trk[i]).abs() <= 1e-12);
    }
}

#[test]
fn certified_run_reports_the_exponential_bound() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_ghz(PolicyKind::Sigma3);
    let out = run_experiment(&cfg, Some(tmp.path())).unwrap();
    let rate = out.summary.reference_rate.unwrap();
    let stats = read_summary_csv(&tmp.path().join("summary.csv")).unwrap();
    let n = cfg.n_trajectories as f64;
    let v0 = stats.mean_trk[0];
    let holds = (0..stats.t.len())
        .all(|i| stats.mean_trk[i] <= v0 * (-rate * stats.t[i]).exp() + 3.0 * stats.std_trk[i] / n.sqrt());
    assert_eq!(out.summary.bound_holds, Some(holds));
    assert!(holds);
    assert!(out.summary.open_loop_final_mean_ds.is_some());
    assert!(tmp.path().join("open_loop_summary.csv").exists());
}

#[test]
fn event_files_match_the_recorded_events() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_ghz(PolicyKind::Sigma4);
    let out = run_experiment(&cfg, Some(tmp.path())).unwrap();
    for r in &out.trajectories {
        let events = read_events_csv(&tmp.path().join(format!("events_{}.csv", r.trajectory))).unwrap();
        assert_eq!(events.len(), r.events.len());
        for (a, b) in events.iter().zip(&r.events) {
            assert_eq!(
                (a.time, a.index, a.gain, a.trigger),
                (b.time, b.index, b.gain, b.trigger)
            );
        }
    }
}

#[test]
fn schedule_file_replays_the_computed_schedule() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_ghz(PolicyKind::Sigma1);
    run_experiment(&cfg, Some(&tmp.path().join("computed"))).unwrap();
    let mut replay = cfg.clone();
    replay.schedule_file = Some(tmp.path().join("computed/schedule.csv"));
    run_experiment(&replay, Some(&tmp.path().join("replayed"))).unwrap();
    let a = std::fs::read(tmp.path().join("computed/summary.csv")).unwrap();
    let b = std::fs::read(tmp.path().join("replayed/summary.csv")).unwrap();
    assert_eq!(a, b);
}

fn assumption_of(e: Error) -> &'static str {
    match e {
        Error::AssumptionViolated { assumption, .. } => assumption,
        other => panic!("expected an assumption violation, got {other}"),
    }
}

#[test]
fn invariance_policies_refuse_non_invariant_banks() {
    for kind in [
        PolicyKind::Sigma1,
        PolicyKind::Sigma2,
        PolicyKind::Sigma3,
        PolicyKind::Sigma4,
    ] {
        let mut cfg = preset_spin32();
        cfg.policy.kind = kind;
        cfg.n_steps = 10;
        cfg.n_trajectories = 1;
        let err = run_experiment(&cfg, None).unwrap_err();
        assert_eq!(assumption_of(err), "target invariance", "{kind}");
    }
}

#[test]
fn sigma5_refuses_banks_without_strict_decrease() {
    let mut cfg = preset_spin32();
    cfg.generators = vec![GeneratorSpec {
        h: zeros(4).into(),
        l_ops: vec![],
        c: zeros(4).into(),
        eta: 1.0,
    }];
    cfg.n_steps = 10;
    cfg.n_trajectories = 1;
    cfg.a2_samples = 100;
    let err = run_experiment(&cfg, None).unwrap_err();
    assert_eq!(assumption_of(err), "strict Lyapunov decrease");
}

#[test]
fn dwell_beyond_the_bound_is_refused() {
    for kind in [PolicyKind::Sigma2, PolicyKind::Sigma3] {
        let mut cfg = small_ghz(kind);
        cfg.policy.dwell = Some(0.5);
        assert!(
            matches!(run_experiment(&cfg, None), Err(Error::InvalidParameter(_))),
            "{kind}"
        );
    }
}
