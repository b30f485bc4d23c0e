//! Switching laws: hysteresis on the average path (σ1), fixed dwell on the
//! average path (σ2), dwell-time argmin on trajectories (σ3), trajectory
//! hysteresis (σ4) and gain-modulated argmin (σ5).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::certificate::{DriftTable, LyapunovCertificate};
use crate::error::{Error, Result};
use crate::lindblad::{GeneratorBank, Propagator};
use crate::operator::{CMat, HermitianBasis, SubspaceDecomposition};
use crate::sme::{Control, Controller};

/// Relative margin of the strict interior test for the regions `Δ_j`.
pub const TOL_REGION: f64 = 1e-9;
/// `Tr(Kρ)` at or below this value counts as being on the target.
pub const TOL_ZERO: f64 = 1e-12;
pub const DEFAULT_V_MAX: f64 = 1e3;
pub const DEFAULT_EPSILON: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    Initialization,
    DwellExpiry,
    RegionExit,
}

/// Selection of a generator index (0-based) and gain from `time` onward.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchEvent {
    pub time: f64,
    pub step: usize,
    pub index: usize,
    pub gain: f64,
    pub trigger: Trigger,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Sigma1,
    Sigma2,
    Sigma3,
    Sigma4,
    Sigma5,
}

impl PolicyKind {
    /// Laws that need an invariant bank and a certificate `(K, c)`.
    pub fn needs_invariance(self) -> bool {
        !matches!(self, PolicyKind::Sigma5)
    }

    pub fn is_offline(self) -> bool {
        matches!(self, PolicyKind::Sigma1 | PolicyKind::Sigma2)
    }

    pub fn uses_dwell(self) -> bool {
        matches!(self, PolicyKind::Sigma2 | PolicyKind::Sigma3 | PolicyKind::Sigma5)
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sigma1" | "s1" => Ok(Self::Sigma1),
            "sigma2" | "s2" => Ok(Self::Sigma2),
            "sigma3" | "s3" => Ok(Self::Sigma3),
            "sigma4" | "s4" => Ok(Self::Sigma4),
            "sigma5" | "s5" => Ok(Self::Sigma5),
            other => Err(Error::Config(format!("unknown policy {other:?}"))),
        }
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Sigma1 => "sigma1",
            Self::Sigma2 => "sigma2",
            Self::Sigma3 => "sigma3",
            Self::Sigma4 => "sigma4",
            Self::Sigma5 => "sigma5",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Dwell time `Δt` for σ2, σ3 and σ5.
    #[serde(default)]
    pub dwell: Option<f64>,
    #[serde(default = "default_v_max")]
    pub v_max: f64,
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_v_max() -> f64 {
    DEFAULT_V_MAX
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon = {} not in (0, 1)",
                self.epsilon
            )));
        }
        if self.kind.uses_dwell() && !self.dwell.is_some_and(|d| d > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{} needs a positive dwell time",
                self.kind
            )));
        }
        if !(self.v_max > 0.0 && self.v_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "v_max = {} must be finite and positive",
                self.v_max
            )));
        }
        Ok(())
    }

    pub fn dwell(&self) -> Result<f64> {
        self.dwell
            .ok_or_else(|| Error::InvalidParameter(format!("{} needs a dwell time", self.kind)))
    }
}

/// `Tr(K L_j(ρ)) ≤ −εc Tr(Kρ)`.
pub fn in_region(table: &DriftTable, j: usize, rho: &CMat, epsilon: f64, c: f64) -> bool {
    table.drift(j, rho) <= -epsilon * c * table.value(rho)
}

/// Strict interior test with relative margin `TOL_REGION`; states with
/// `Tr(Kρ) ≤ TOL_ZERO` are on the target and never trigger an exit.
pub fn in_region_interior(table: &DriftTable, j: usize, rho: &CMat, epsilon: f64, c: f64) -> bool {
    let v = table.value(rho);
    if v <= TOL_ZERO {
        return true;
    }
    table.drift(j, rho) + epsilon * c * v < -TOL_REGION * v
}

/// Number of whole steps of length `dt` in `span`, rejecting misaligned spans.
pub fn steps_in(span: f64, dt: f64) -> Result<usize> {
    let r = span / dt;
    let n = r.round();
    if !(n >= 0.0) || (r - n).abs() > 1e-6 * n.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "{span} is not a multiple of the step {dt}"
        )));
    }
    Ok(n as usize)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AveragePath {
    pub t: Vec<f64>,
    pub tr_k: Vec<f64>,
    pub d_s: Vec<f64>,
    /// Index used on the step ending at each time.
    pub active: Vec<usize>,
}

/// Offline schedule computed on the average (master-equation) path.
#[derive(Clone, Debug)]
pub struct OfflineSchedule {
    pub events: Vec<SwitchEvent>,
    pub path: AveragePath,
    pub dt_check: f64,
}

impl OfflineSchedule {
    /// Gaps between consecutive events that change the index.
    pub fn switch_gaps(&self) -> Vec<f64> {
        self.events.windows(2).map(|w| w[1].time - w[0].time).collect()
    }
}

struct AverageStepper {
    basis: HermitianBasis,
    exps: Vec<nalgebra::DMatrix<f64>>,
    v: nalgebra::DVector<f64>,
}

impl AverageStepper {
    fn new(bank: &GeneratorBank, rho0: &CMat, dt: f64) -> Result<Self> {
        let basis = HermitianBasis::gell_mann(bank.dim());
        let exps = bank
            .generators()
            .iter()
            .map(|g| Propagator::new(g, dt).map(|p| p.matrix().clone()))
            .collect::<Result<_>>()?;
        let v = basis.vectorize(rho0)?;
        Ok(Self { basis, exps, v })
    }

    fn advance(&mut self, k: usize) -> Result<CMat> {
        self.v = &self.exps[k] * &self.v;
        self.basis.devectorize(&self.v)
    }
}

fn record(path: &mut AveragePath, t: f64, rho: &CMat, table: &DriftTable, d: &SubspaceDecomposition, k: usize) {
    path.t.push(t);
    path.tr_k.push(table.value(rho));
    path.d_s.push(d.subspace_distance(rho));
    path.active.push(k);
}

/// σ1: propagate `ρ̂` under the active generator and switch, by argmin, at the
/// first grid time where `ρ̂` leaves the interior of its region.
pub fn run_sigma1(
    bank: &GeneratorBank,
    d: &SubspaceDecomposition,
    cert: &LyapunovCertificate,
    epsilon: f64,
    rho0: &CMat,
    t_final: f64,
    dt_check: f64,
) -> Result<OfflineSchedule> {
    let n_steps = steps_in(t_final, dt_check)?;
    let table = DriftTable::new(bank, &cert.k)?;
    let mut avg = AverageStepper::new(bank, rho0, dt_check)?;
    let (_, mut k) = table.min_drift(rho0);
    let mut events = vec![SwitchEvent {
        time: 0.0,
        step: 0,
        index: k,
        gain: 1.0,
        trigger: Trigger::Initialization,
    }];
    let mut path = AveragePath::default();
    record(&mut path, 0.0, rho0, &table, d, k);
    for n in 0..n_steps {
        let rho = avg.advance(k)?;
        let t = (n + 1) as f64 * dt_check;
        record(&mut path, t, &rho, &table, d, k);
        if !in_region_interior(&table, k, &rho, epsilon, cert.c) {
            let (_, next) = table.min_drift(&rho);
            if next != k {
                k = next;
                events.push(SwitchEvent {
                    time: t,
                    step: n + 1,
                    index: k,
                    gain: 1.0,
                    trigger: Trigger::RegionExit,
                });
            }
        }
    }
    Ok(OfflineSchedule { events, path, dt_check })
}

/// σ2: argmin re-selection on `ρ̂` at every multiple of `dwell ≤ t_D`.
#[allow(clippy::too_many_arguments)]
pub fn run_sigma2(
    bank: &GeneratorBank,
    d: &SubspaceDecomposition,
    cert: &LyapunovCertificate,
    dwell: f64,
    t_d: f64,
    rho0: &CMat,
    t_final: f64,
    dt_check: f64,
) -> Result<OfflineSchedule> {
    check_dwell(dwell, t_d)?;
    let n_steps = steps_in(t_final, dt_check)?;
    let dwell_steps = steps_in(dwell, dt_check)?.max(1);
    let table = DriftTable::new(bank, &cert.k)?;
    let mut avg = AverageStepper::new(bank, rho0, dt_check)?;
    let mut path = AveragePath::default();
    let mut events = Vec::new();
    let mut rho = rho0.clone();
    let mut k = 0;
    for n in 0..n_steps {
        if n % dwell_steps == 0 {
            k = table.min_drift(&rho).1;
            let trigger = if n == 0 {
                Trigger::Initialization
            } else {
                Trigger::DwellExpiry
            };
            let time = (n / dwell_steps) as f64 * dwell;
            events.push(SwitchEvent {
                time,
                step: n,
                index: k,
                gain: 1.0,
                trigger,
            });
        }
        if n == 0 {
            record(&mut path, 0.0, rho0, &table, d, k);
        }
        rho = avg.advance(k)?;
        record(&mut path, (n + 1) as f64 * dt_check, &rho, &table, d, k);
    }
    Ok(OfflineSchedule { events, path, dt_check })
}

pub fn check_dwell(dwell: f64, t_d: f64) -> Result<()> {
    if !(dwell > 0.0 && dwell <= t_d) {
        return Err(Error::InvalidParameter(format!(
            "dwell time {dwell} must lie in (0, t_D = {t_d}]"
        )));
    }
    Ok(())
}

/// σ3: argmin on the trajectory state at dwell multiples, unit gain.
#[derive(Clone, Debug)]
pub struct Sigma3 {
    table: DriftTable,
    dwell: f64,
    dwell_steps: usize,
    current: usize,
    events: Vec<SwitchEvent>,
}

impl Sigma3 {
    pub fn new(table: DriftTable, dwell: f64, t_d: f64, dt: f64) -> Result<Self> {
        check_dwell(dwell, t_d)?;
        let dwell_steps = steps_in(dwell, dt)?.max(1);
        Ok(Self {
            table,
            dwell,
            dwell_steps,
            current: 0,
            events: Vec::new(),
        })
    }
}

impl Controller for Sigma3 {
    fn control(&mut self, step: usize, _t: f64, rho: &CMat) -> Result<Control> {
        if step.is_multiple_of(self.dwell_steps) {
            self.current = self.table.min_drift(rho).1;
            let trigger = if step == 0 {
                Trigger::Initialization
            } else {
                Trigger::DwellExpiry
            };
            let time = (step / self.dwell_steps) as f64 * self.dwell;
            self.events.push(SwitchEvent {
                time,
                step,
                index: self.current,
                gain: 1.0,
                trigger,
            });
        }
        Ok(Control {
            index: self.current,
            gain: 1.0,
        })
    }

    fn take_events(&mut self) -> Vec<SwitchEvent> {
        std::mem::take(&mut self.events)
    }
}

/// σ4: keep the active index while the trajectory state stays in the
/// interior of its region, otherwise re-select by argmin.
#[derive(Clone, Debug)]
pub struct Sigma4 {
    table: DriftTable,
    epsilon: f64,
    c: f64,
    dt: f64,
    current: usize,
    events: Vec<SwitchEvent>,
}

impl Sigma4 {
    pub fn new(table: DriftTable, epsilon: f64, c: f64, dt: f64) -> Self {
        Self {
            table,
            epsilon,
            c,
            dt,
            current: 0,
            events: Vec::new(),
        }
    }
}

impl Controller for Sigma4 {
    fn control(&mut self, step: usize, _t: f64, rho: &CMat) -> Result<Control> {
        let time = step as f64 * self.dt;
        if step == 0 {
            self.current = self.table.min_drift(rho).1;
            self.events.push(SwitchEvent {
                time,
                step,
                index: self.current,
                gain: 1.0,
                trigger: Trigger::Initialization,
            });
        } else if !in_region_interior(&self.table, self.current, rho, self.epsilon, self.c) {
            let next = self.table.min_drift(rho).1;
            if next != self.current {
                self.current = next;
                self.events.push(SwitchEvent {
                    time,
                    step,
                    index: next,
                    gain: 1.0,
                    trigger: Trigger::RegionExit,
                });
            }
        }
        Ok(Control {
            index: self.current,
            gain: 1.0,
        })
    }

    fn take_events(&mut self) -> Vec<SwitchEvent> {
        std::mem::take(&mut self.events)
    }
}

/// σ5 selection at a dwell boundary: argmin index and gain
/// `min(V_max, −Tr(K L_k ρ)/(M̄ Δt))`, or zero gain on the target.
pub fn sigma5_decision(table: &DriftTable, rho: &CMat, m_bar: f64, dwell: f64, v_max: f64) -> Control {
    let (drift, index) = table.min_drift(rho);
    let gain = if table.value(rho) > TOL_ZERO && m_bar > 0.0 {
        (-drift / (m_bar * dwell)).clamp(0.0, v_max)
    } else {
        0.0
    };
    Control { index, gain }
}

/// σ5: gain-modulated argmin at dwell multiples.
#[derive(Clone, Debug)]
pub struct Sigma5 {
    table: DriftTable,
    m_bar: f64,
    dwell: f64,
    dwell_steps: usize,
    v_max: f64,
    current: Control,
    cap_hits: usize,
    events: Vec<SwitchEvent>,
}

impl Sigma5 {
    pub fn new(table: DriftTable, m_bar: f64, dwell: f64, v_max: f64, dt: f64) -> Result<Self> {
        if !(m_bar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "modulation bound {m_bar} must be positive"
            )));
        }
        if !(v_max > 0.0 && v_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "v_max = {v_max} must be finite and positive"
            )));
        }
        let dwell_steps = steps_in(dwell, dt)?.max(1);
        Ok(Self {
            table,
            m_bar,
            dwell,
            dwell_steps,
            v_max,
            current: Control { index: 0, gain: 0.0 },
            cap_hits: 0,
            events: Vec::new(),
        })
    }

    /// Number of dwell boundaries at which the gain cap was binding.
    pub fn cap_hits(&self) -> usize {
        self.cap_hits
    }
}

impl Controller for Sigma5 {
    fn control(&mut self, step: usize, _t: f64, rho: &CMat) -> Result<Control> {
        if step.is_multiple_of(self.dwell_steps) {
            self.current = sigma5_decision(&self.table, rho, self.m_bar, self.dwell, self.v_max);
            if self.current.gain >= self.v_max {
                self.cap_hits += 1;
            }
            let trigger = if step == 0 {
                Trigger::Initialization
            } else {
                Trigger::DwellExpiry
            };
            self.events.push(SwitchEvent {
                time: (step / self.dwell_steps) as f64 * self.dwell,
                step,
                index: self.current.index,
                gain: self.current.gain,
                trigger,
            });
        }
        Ok(self.current)
    }

    fn take_events(&mut self) -> Vec<SwitchEvent> {
        std::mem::take(&mut self.events)
    }
}

/// Replays a fixed schedule on a trajectory; each event's time is mapped to
/// the integration grid.
#[derive(Clone, Debug)]
pub struct ScheduleReplay {
    schedule: Vec<(usize, SwitchEvent)>,
    next: usize,
    current: usize,
    events: Vec<SwitchEvent>,
}

impl ScheduleReplay {
    pub fn new(events: &[SwitchEvent], dt: f64) -> Result<Self> {
        let mut schedule = Vec::with_capacity(events.len());
        for e in events {
            schedule.push((steps_in(e.time, dt)?, *e));
        }
        if schedule.first().is_none_or(|(s, _)| *s != 0) {
            return Err(Error::InvalidParameter("schedule must start at t = 0".into()));
        }
        if schedule.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidParameter(
                "schedule times must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            schedule,
            next: 0,
            current: 0,
            events: Vec::new(),
        })
    }
}

impl Controller for ScheduleReplay {
    fn control(&mut self, step: usize, _t: f64, _rho: &CMat) -> Result<Control> {
        if step == 0 {
            self.next = 0;
        }
        while self.next < self.schedule.len() && self.schedule[self.next].0 <= step {
            let (s, e) = self.schedule[self.next];
            self.current = e.index;
            self.events.push(SwitchEvent { step: s, ..e });
            self.next += 1;
        }
        Ok(Control {
            index: self.current,
            gain: 1.0,
        })
    }

    fn take_events(&mut self) -> Vec<SwitchEvent> {
        std::mem::take(&mut self.events)
    }
}

/// Constant generator with unit gain (open-loop baseline).
#[derive(Clone, Debug, Default)]
pub struct OpenLoop {
    pub index: usize,
}

impl Controller for OpenLoop {
    fn control(&mut self, _step: usize, _t: f64, _rho: &CMat) -> Result<Control> {
        Ok(Control {
            index: self.index,
            gain: 1.0,
        })
    }

    fn take_events(&mut self) -> Vec<SwitchEvent> {
        Vec::new()
    }
}

#[derive(Serialize, Deserialize)]
struct EventRow {
    time: f64,
    index: usize,
    gain: f64,
    trigger: Trigger,
}

/// Writes events as CSV with columns `time,index,gain,trigger`; indices are 1-based.
pub fn write_events_csv(path: &Path, events: &[SwitchEvent]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for e in events {
        w.serialize(EventRow {
            time: e.time,
            index: e.index + 1,
            gain: e.gain,
            trigger: e.trigger,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a schedule written by [`write_events_csv`]; `step` is recomputed on replay.
pub fn read_events_csv(path: &Path) -> Result<Vec<SwitchEvent>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in r.deserialize() {
        let row: EventRow = row?;
        if row.index == 0 {
            return Err(Error::Config("schedule indices are 1-based".into()));
        }
        out.push(SwitchEvent {
            time: row.time,
            step: 0,
            index: row.index - 1,
            gain: row.gain,
            trigger: row.trigger,
        });
    }
    Ok(out)
}
