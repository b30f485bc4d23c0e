use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, LyapunovSpec};
use super::stats::{estimate_lyapunov_exponent, exponential_bound_holds, mean_std, ExponentEstimate, SeriesStats};
use crate::certificate::{
    build_certificate, check_a2_sampled, compute_l_bounds, compute_modulation_bound, distance_constants, A2Report,
    DriftTable, DwellTimeBounds, LyapunovCertificate, ModulationBound,
};
use crate::error::{Error, Result};
use crate::lindblad::{check_invariance, spectral_abscissa, GeneratorBank, InvarianceReport, SpectrumReport, TOL_GAS};
use crate::operator::{CMat, DensityMatrix, SubspaceDecomposition};
use crate::sme::{
    simulate_trajectory, Controller, Integrator, NoiseStream, Observables, TrajectoryOptions, TrajectoryRecord,
};
use crate::switching::{
    check_dwell, read_events_csv, run_sigma1, run_sigma2, steps_in, write_events_csv, OfflineSchedule, OpenLoop,
    PolicyKind, ScheduleReplay, Sigma3, Sigma4, Sigma5,
};

/// Model, certificate and bounds after the prerequisites of the policy were checked.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub bank: GeneratorBank,
    pub decomposition: SubspaceDecomposition,
    pub rho0: DensityMatrix,
    pub invariance: Vec<InvarianceReport>,
    pub spectra: Vec<SpectrumReport>,
    pub combined: SpectrumReport,
    pub certificate: Option<LyapunovCertificate>,
    pub k: CMat,
    pub bounds: Option<DwellTimeBounds>,
    pub modulation: ModulationBound,
    pub a2: Option<A2Report>,
    pub distance_constants: Option<(f64, f64)>,
}

impl Prepared {
    pub fn all_invariant(&self) -> bool {
        self.invariance.iter().all(|r| r.invariant)
    }

    /// `εc` when a positive decay constant is certified.
    pub fn reference_rate(&self) -> Option<f64> {
        let c = self.certificate.as_ref()?.c;
        (self.all_invariant() && c > 0.0).then_some(self.config.policy.epsilon * c)
    }
}

fn violated(assumption: &'static str, detail: String) -> Error {
    Error::AssumptionViolated { assumption, detail }
}

/// Builds the model and verifies what the configured policy requires:
/// invariance and a certified decay constant for σ1–σ4 (plus `Δt ≤ t_D` for
/// σ2/σ3), and a sampled strict-decrease check for σ5.
pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    cfg.validate()?;
    let bank = cfg.bank()?;
    let d = cfg.decomposition()?;
    let rho0 = cfg.initial_state()?;
    let invariance = bank
        .generators()
        .iter()
        .map(|g| check_invariance(g, &d, TOL_GAS))
        .collect::<Result<Vec<_>>>()?;
    let spectra = bank
        .generators()
        .iter()
        .map(|g| spectral_abscissa(g, &d))
        .collect::<Result<Vec<_>>>()?;
    let gamma = cfg.lyapunov.gamma(bank.len())?;
    let combined = spectral_abscissa(&bank.convex_combination(gamma.as_slice())?, &d)?;
    let kind = cfg.policy.kind;
    let all_invariant = invariance.iter().all(|r| r.invariant);

    if kind.needs_invariance() {
        if let Some((j, r)) = invariance.iter().enumerate().find(|(_, r)| !r.invariant) {
            return Err(violated(
                "target invariance",
                format!(
                    "generator {} leaves the target (residual {:.3e}); {kind} cannot run",
                    j + 1,
                    r.max_residual()
                ),
            ));
        }
    }

    let certificate = match &cfg.lyapunov {
        LyapunovSpec::Construct { .. } => Some(build_certificate(&bank, &d, &gamma, &Default::default())?),
        LyapunovSpec::Given { k, .. } => {
            let k_r = d.r_block(&k.0)?;
            LyapunovCertificate::from_k_r(&bank, &d, gamma.clone(), k_r).ok()
        }
    };
    let k = match (&cfg.lyapunov, &certificate) {
        (LyapunovSpec::Given { k, .. }, _) => k.0.clone(),
        (_, Some(cert)) => cert.k.clone(),
        _ => unreachable!("constructed certificates are always present"),
    };
    if kind.needs_invariance() && !certificate.as_ref().is_some_and(|c| c.c > 0.0) {
        return Err(violated(
            "certified decay",
            format!("K admits no positive decay constant; {kind} cannot run"),
        ));
    }

    let bounds = match &certificate {
        Some(cert) if all_invariant && cert.c > 0.0 => Some(compute_l_bounds(&bank, &d, cert, cfg.policy.epsilon)?),
        _ => None,
    };
    if matches!(kind, PolicyKind::Sigma2 | PolicyKind::Sigma3) {
        let t_d = bounds.as_ref().map_or(0.0, |b| b.t_d);
        check_dwell(cfg.policy.dwell()?, t_d)?;
    }
    let modulation = compute_modulation_bound(&bank, &k)?;
    let a2 = if kind == PolicyKind::Sigma5 {
        let report = check_a2_sampled(&bank, &k, &d, cfg.a2_samples, cfg.seed)?;
        if report.violations > 0 {
            return Err(violated(
                "strict Lyapunov decrease",
                format!(
                    "{} of {} sampled off-target states have min_k Tr(K L_k(ρ)) ≥ 0 (largest {:.3e})",
                    report.violations, report.samples, report.max_drift
                ),
            ));
        }
        if !(modulation.m_bar > 0.0) {
            return Err(violated("bounded modulation", "M̄_K is zero".into()));
        }
        Some(report)
    } else {
        None
    };
    let distance = certificate
        .as_ref()
        .and_then(|c| distance_constants(&c.k_r, cfg.dim).ok());
    Ok(Prepared {
        config: cfg.clone(),
        bank,
        decomposition: d,
        rho0,
        invariance,
        spectra,
        combined,
        certificate,
        k,
        bounds,
        modulation,
        a2,
        distance_constants: distance,
    })
}

/// Non-failing assumption report: invariance, spectra, certificate, bounds
/// and the sampled decrease check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub invariance: Vec<InvarianceReport>,
    pub spectra: Vec<SpectrumReport>,
    pub combined: SpectrumReport,
    pub certificate: Option<LyapunovCertificate>,
    pub certificate_error: Option<String>,
    pub bounds: Option<DwellTimeBounds>,
    pub modulation: Option<ModulationBound>,
    pub a2: Option<A2Report>,
    pub prerequisites: std::result::Result<(), String>,
}

impl CheckReport {
    pub fn passes(&self) -> bool {
        self.prerequisites.is_ok()
    }
}

pub fn check_report(cfg: &ExperimentConfig) -> Result<CheckReport> {
    cfg.validate()?;
    let bank = cfg.bank()?;
    let d = cfg.decomposition()?;
    let invariance = bank
        .generators()
        .iter()
        .map(|g| check_invariance(g, &d, TOL_GAS))
        .collect::<Result<Vec<_>>>()?;
    let spectra = bank
        .generators()
        .iter()
        .map(|g| spectral_abscissa(g, &d))
        .collect::<Result<Vec<_>>>()?;
    let gamma = cfg.lyapunov.gamma(bank.len())?;
    let combined = spectral_abscissa(&bank.convex_combination(gamma.as_slice())?, &d)?;
    let (certificate, certificate_error) = match &cfg.lyapunov {
        LyapunovSpec::Construct { .. } => match build_certificate(&bank, &d, &gamma, &Default::default()) {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        },
        LyapunovSpec::Given { k, .. } => match d
            .r_block(&k.0)
            .and_then(|k_r| LyapunovCertificate::from_k_r(&bank, &d, gamma.clone(), k_r))
        {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        },
    };
    let all_invariant = invariance.iter().all(|r| r.invariant);
    let bounds = certificate
        .as_ref()
        .filter(|c| all_invariant && c.c > 0.0)
        .and_then(|c| compute_l_bounds(&bank, &d, c, cfg.policy.epsilon).ok());
    let k = match &cfg.lyapunov {
        LyapunovSpec::Given { k, .. } => Some(k.0.clone()),
        LyapunovSpec::Construct { .. } => certificate.as_ref().map(|c| c.k.clone()),
    };
    let modulation = k.as_ref().map(|k| compute_modulation_bound(&bank, k)).transpose()?;
    let a2 = k
        .as_ref()
        .map(|k| check_a2_sampled(&bank, k, &d, cfg.a2_samples, cfg.seed))
        .transpose()?;
    let prerequisites = prepare(cfg).map(|_| ()).map_err(|e| e.to_string());
    Ok(CheckReport {
        invariance,
        spectra,
        combined,
        certificate,
        certificate_error,
        bounds,
        modulation,
        a2,
        prerequisites,
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SwitchStats {
    pub mean: f64,
    pub min: usize,
    pub max: usize,
    /// Number of trajectories per switch count.
    pub histogram: BTreeMap<usize, usize>,
    /// Smallest gap between consecutive index changes over all trajectories.
    pub min_gap: Option<f64>,
}

impl SwitchStats {
    fn from_records(records: &[TrajectoryRecord]) -> Self {
        let mut out = SwitchStats {
            min: usize::MAX,
            ..Default::default()
        };
        let mut total = 0usize;
        for r in records {
            let mut count = 0;
            let mut last: Option<(f64, usize)> = None;
            for e in &r.events {
                match last {
                    Some((t, k)) if k != e.index => {
                        count += 1;
                        let gap = e.time - t;
                        out.min_gap = Some(out.min_gap.map_or(gap, |g: f64| g.min(gap)));
                        last = Some((e.time, e.index));
                    }
                    None => last = Some((e.time, e.index)),
                    _ => {}
                }
            }
            total += count;
            out.min = out.min.min(count);
            out.max = out.max.max(count);
            *out.histogram.entry(count).or_default() += 1;
        }
        out.mean = total as f64 / records.len().max(1) as f64;
        if records.is_empty() {
            out.min = 0;
        }
        out
    }
}

/// Paired per-dwell decrease of `Tr(Kρ)`: at each dwell boundary `t_n`, the
/// mean of `Tr(Kρ(t_{n+1})) − Tr(Kρ(t_n))` is below three standard errors.
#[derive(Clone, Debug, Serialize)]
pub struct DwellDecrease {
    pub boundaries: usize,
    pub holds: usize,
    pub fraction: f64,
    pub pass: bool,
}

fn dwell_decrease(records: &[TrajectoryRecord], dwell_records: usize) -> Option<DwellDecrease> {
    let len = records.first()?.t.len();
    if dwell_records == 0 {
        return None;
    }
    let mut boundaries = 0;
    let mut holds = 0;
    let mut i = 0;
    while i + dwell_records < len {
        let diffs: Vec<f64> = records.iter().map(|r| r.tr_k[i + dwell_records] - r.tr_k[i]).collect();
        let (m, s) = mean_std(&diffs);
        let se = s / (diffs.len() as f64).sqrt();
        boundaries += 1;
        if m < 3.0 * se || (se == 0.0 && m <= 0.0) {
            holds += 1;
        }
        i += dwell_records;
    }
    let fraction = if boundaries == 0 {
        1.0
    } else {
        holds as f64 / boundaries as f64
    };
    Some(DwellDecrease {
        boundaries,
        holds,
        fraction,
        pass: fraction >= 0.95,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub policy: PolicyKind,
    pub n_trajectories: usize,
    pub dt: f64,
    pub n_steps: usize,
    pub initial_mean_ds: f64,
    pub final_mean_ds: f64,
    pub final_stderr_ds: f64,
    pub exponent: Option<ExponentEstimate>,
    pub exponent_error: Option<String>,
    /// `εc` when certified.
    pub reference_rate: Option<f64>,
    /// Mean `Tr(Kρ(t))` stays below `Tr(Kρ0)e^{−εct}` plus three standard errors.
    pub bound_holds: Option<bool>,
    pub switches: SwitchStats,
    pub repair_total: f64,
    pub repair_max: f64,
    pub dwell_decrease: Option<DwellDecrease>,
    pub open_loop_final_mean_ds: Option<f64>,
    pub open_loop_final_stderr_ds: Option<f64>,
    pub faster_than_open_loop: Option<bool>,
    pub checks_pass: bool,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub prepared: Prepared,
    pub summary: RunSummary,
    pub stats: SeriesStats,
    pub open_loop: Option<SeriesStats>,
    pub trajectories: Vec<TrajectoryRecord>,
    pub open_loop_trajectories: Vec<TrajectoryRecord>,
    pub schedule: Option<OfflineSchedule>,
    pub wall_clock_seconds: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a ExperimentConfig,
    base_seed: u64,
    /// Noise stream of trajectory `i` is `(base_seed, i)`.
    stream_indices: [usize; 2],
    invariance: &'a [InvarianceReport],
    spectra: &'a [SpectrumReport],
    combined: &'a SpectrumReport,
    certificate: Option<&'a LyapunovCertificate>,
    c: Option<f64>,
    t_d: Option<f64>,
    bounds: Option<&'a DwellTimeBounds>,
    m_bar: f64,
    distance_constants: Option<(f64, f64)>,
    a2: Option<&'a A2Report>,
    summary: &'a RunSummary,
}

fn make_controller(prep: &Prepared, schedule: Option<&OfflineSchedule>) -> Result<Box<dyn Controller>> {
    let cfg = &prep.config;
    let dt = cfg.integrator.dt;
    let table = || DriftTable::new(&prep.bank, &prep.k);
    let t_d = prep.bounds.as_ref().map_or(0.0, |b| b.t_d);
    let c = prep.certificate.as_ref().map_or(0.0, |c| c.c);
    Ok(match cfg.policy.kind {
        PolicyKind::Sigma1 | PolicyKind::Sigma2 => {
            let s = schedule.ok_or_else(|| Error::Config("missing offline schedule".into()))?;
            Box::new(ScheduleReplay::new(&s.events, dt)?)
        }
        PolicyKind::Sigma3 => Box::new(Sigma3::new(table()?, cfg.policy.dwell()?, t_d, dt)?),
        PolicyKind::Sigma4 => Box::new(Sigma4::new(table()?, cfg.policy.epsilon, c, dt)),
        PolicyKind::Sigma5 => Box::new(Sigma5::new(
            table()?,
            prep.modulation.m_bar,
            cfg.policy.dwell()?,
            cfg.policy.v_max,
            dt,
        )?),
    })
}

fn offline_schedule(prep: &Prepared) -> Result<Option<OfflineSchedule>> {
    let cfg = &prep.config;
    let kind = cfg.policy.kind;
    if !kind.is_offline() {
        return Ok(None);
    }
    let dt_check = cfg.dt_check.unwrap_or(cfg.integrator.dt);
    let cert = prep.certificate.as_ref().expect("checked by prepare");
    if let Some(path) = &cfg.schedule_file {
        let events = read_events_csv(path)?;
        return Ok(Some(OfflineSchedule {
            events,
            path: Default::default(),
            dt_check,
        }));
    }
    let rho0 = prep.rho0.matrix();
    let t = cfg.t_final();
    let d = &prep.decomposition;
    let s = match kind {
        PolicyKind::Sigma1 => run_sigma1(&prep.bank, d, cert, cfg.policy.epsilon, rho0, t, dt_check)?,
        _ => {
            let t_d = prep.bounds.as_ref().map_or(0.0, |b| b.t_d);
            run_sigma2(&prep.bank, d, cert, cfg.policy.dwell()?, t_d, rho0, t, dt_check)?
        }
    };
    Ok(Some(s))
}

fn run_ensemble(
    prep: &Prepared,
    integrator: &Integrator,
    controller: &(dyn Fn() -> Result<Box<dyn Controller>> + Sync),
    check_population: bool,
) -> Result<Vec<TrajectoryRecord>> {
    let cfg = &prep.config;
    let obs = Observables {
        decomposition: prep.decomposition.clone(),
        k: prep.k.clone(),
    };
    let opts = TrajectoryOptions {
        n_steps: cfg.n_steps,
        record_stride: cfg.record_stride,
        store_states: false,
        check_off_target_population: check_population,
    };
    (0..cfg.n_trajectories)
        .into_par_iter()
        .map(|i| {
            let mut integ = integrator.clone();
            let mut ctl = controller()?;
            let mut noise = NoiseStream::new(cfg.seed, i as u64, cfg.integrator.dt)?;
            simulate_trajectory(&mut integ, ctl.as_mut(), prep.rho0.matrix(), &obs, &mut noise, &opts, i)
        })
        .collect()
}

fn aggregate(records: &[TrajectoryRecord]) -> Result<SeriesStats> {
    let t = &records[0].t;
    let ds: Vec<&[f64]> = records.iter().map(|r| r.d_s.as_slice()).collect();
    let trk: Vec<&[f64]> = records.iter().map(|r| r.tr_k.as_slice()).collect();
    SeriesStats::from_series(t, &ds, &trk)
}

/// Runs all trajectories (and the open-loop baseline when configured),
/// aggregates statistics and, when `out` is given, writes the artifact files.
pub fn run_experiment(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<RunOutput> {
    let start = Instant::now();
    let prep = prepare(cfg)?;
    let work = || run_prepared(&prep);
    let (schedule, records, open_records) = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let stats = aggregate(&records)?;
    let open_loop = if open_records.is_empty() {
        None
    } else {
        Some(aggregate(&open_records)?)
    };
    let summary = summarize(&prep, &stats, open_loop.as_ref(), &records)?;
    let output = RunOutput {
        summary,
        stats,
        open_loop,
        trajectories: records,
        open_loop_trajectories: open_records,
        schedule,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        prepared: prep,
    };
    if let Some(dir) = out {
        write_outputs(&output, dir)?;
    }
    Ok(output)
}

type Ensembles = (Option<OfflineSchedule>, Vec<TrajectoryRecord>, Vec<TrajectoryRecord>);

fn run_prepared(prep: &Prepared) -> Result<Ensembles> {
    let cfg = &prep.config;
    let schedule = offline_schedule(prep)?;
    let integrator = Integrator::from_bank(&prep.bank, cfg.integrator.clone())?;
    let check_population = prep.all_invariant() && prep.decomposition.population_r(prep.rho0.matrix()) > 1e-12;
    let records = run_ensemble(
        prep,
        &integrator,
        &|| make_controller(prep, schedule.as_ref()),
        check_population,
    )?;
    let open_records = if cfg.open_loop_compare {
        let gamma = cfg.lyapunov.gamma(prep.bank.len())?;
        let g = prep.bank.convex_combination(gamma.as_slice())?;
        let mut icfg = cfg.integrator.clone();
        icfg.scheme = crate::sme::Scheme::Rouchon;
        let integ = Integrator::new(std::slice::from_ref(&g), icfg)?;
        run_ensemble(
            prep,
            &integ,
            &|| Ok(Box::new(OpenLoop::default()) as Box<dyn Controller>),
            check_population,
        )?
    } else {
        Vec::new()
    };
    Ok((schedule, records, open_records))
}

fn summarize(
    prep: &Prepared,
    stats: &SeriesStats,
    open_loop: Option<&SeriesStats>,
    records: &[TrajectoryRecord],
) -> Result<RunSummary> {
    let cfg = &prep.config;
    let t_final = cfg.t_final();
    let reference_rate = prep.reference_rate();
    let window = [cfg.fit_window[0] * t_final, cfg.fit_window[1] * t_final];
    let (exponent, exponent_error) =
        match estimate_lyapunov_exponent(&stats.t, &stats.mean_trk, window, reference_rate.map(|r| -r)) {
            Ok(e) => (Some(e), None),
            Err(e) => (None, Some(e.to_string())),
        };
    let bound_holds = reference_rate.map(|r| exponential_bound_holds(stats, r));
    let last = stats.t.len() - 1;
    let final_mean_ds = stats.mean_ds[last];
    let final_stderr_ds = stats.stderr_ds(last);
    let (open_loop_final_mean_ds, open_loop_final_stderr_ds) = match open_loop {
        Some(o) => (Some(o.mean_ds[last]), Some(o.stderr_ds(last))),
        None => (None, None),
    };
    let faster_than_open_loop = open_loop_final_mean_ds.map(|o| final_mean_ds < o);
    let dwell_dec = if cfg.policy.kind == PolicyKind::Sigma5 {
        let dwell_steps = steps_in(cfg.policy.dwell()?, cfg.integrator.dt)?;
        if dwell_steps % cfg.record_stride == 0 {
            dwell_decrease(records, dwell_steps / cfg.record_stride)
        } else {
            None
        }
    } else {
        None
    };
    let repair_total: f64 = records.iter().map(|r| r.repair_total).sum();
    let repair_max = records.iter().map(|r| r.repair_total).fold(0.0, f64::max);
    let exponent_ok =
        exponent.as_ref().and_then(|e| e.pass).unwrap_or(true) && !(reference_rate.is_some() && exponent.is_none());
    let checks_pass = bound_holds.unwrap_or(true) && exponent_ok && dwell_dec.as_ref().is_none_or(|d| d.pass);
    Ok(RunSummary {
        policy: cfg.policy.kind,
        n_trajectories: records.len(),
        dt: cfg.integrator.dt,
        n_steps: cfg.n_steps,
        initial_mean_ds: stats.mean_ds[0],
        final_mean_ds,
        final_stderr_ds,
        exponent,
        exponent_error,
        reference_rate,
        bound_holds,
        switches: SwitchStats::from_records(records),
        repair_total,
        repair_max,
        dwell_decrease: dwell_dec,
        open_loop_final_mean_ds,
        open_loop_final_stderr_ds,
        faster_than_open_loop,
        checks_pass,
    })
}

fn write_trajectory_csv(path: &Path, r: &TrajectoryRecord) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "d_S", "trK", "active_k", "gain", "dY"])?;
    for i in 0..r.t.len() {
        w.serialize((r.t[i], r.d_s[i], r.tr_k[i], r.active[i] + 1, r.gain[i], r.dy[i]))?;
    }
    w.flush()?;
    Ok(())
}

fn write_outputs(o: &RunOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let prep = &o.prepared;
    o.stats.write_csv(&dir.join("summary.csv"))?;
    if let Some(ol) = &o.open_loop {
        ol.write_csv(&dir.join("open_loop_summary.csv"))?;
    }
    for r in &o.trajectories {
        write_events_csv(&dir.join(format!("events_{}.csv", r.trajectory)), &r.events)?;
        if prep.config.write_trajectories {
            write_trajectory_csv(&dir.join(format!("traj_{}.csv", r.trajectory)), r)?;
        }
    }
    if let Some(s) = &o.schedule {
        write_events_csv(&dir.join("schedule.csv"), &s.events)?;
        if !s.path.t.is_empty() {
            let mut w = csv::Writer::from_path(dir.join("average_path.csv"))?;
            w.write_record(["t", "d_S", "trK", "active_k"])?;
            for i in 0..s.path.t.len() {
                w.serialize((s.path.t[i], s.path.d_s[i], s.path.tr_k[i], s.path.active[i] + 1))?;
            }
            w.flush()?;
        }
    }
    let manifest = Manifest {
        config: &prep.config,
        base_seed: prep.config.seed,
        stream_indices: [0, prep.config.n_trajectories],
        invariance: &prep.invariance,
        spectra: &prep.spectra,
        combined: &prep.combined,
        certificate: prep.certificate.as_ref(),
        c: prep.certificate.as_ref().map(|c| c.c),
        t_d: prep.bounds.as_ref().map(|b| b.t_d),
        bounds: prep.bounds.as_ref(),
        m_bar: prep.modulation.m_bar,
        distance_constants: prep.distance_constants,
        a2: prep.a2.as_ref(),
        summary: &o.summary,
    };
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    let timing = serde_json::json!({ "wall_clock_seconds": o.wall_clock_seconds });
    std::fs::write(dir.join("timing.json"), serde_json::to_string_pretty(&timing)?)?;
    Ok(())
}
