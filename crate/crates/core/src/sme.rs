//! Integration of the switched diffusive stochastic master equation
//! `dρ = Σ_k u_k L_k(ρ) dt + G_C(ρ) dW` with seeded per-trajectory noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{GeneratorBank, LindbladGenerator};
use crate::operator::{c64, ensure_dim, hermitian_eigen, trace_product_re, trace_re, CMat, SubspaceDecomposition};
use crate::switching::SwitchEvent;

/// Gaussian increments `ΔW ~ N(0, δt)` from a ChaCha stream selected by
/// `(seed, stream_index)`.
#[derive(Clone, Debug)]
pub struct NoiseStream {
    seed: u64,
    stream_index: u64,
    sqrt_dt: f64,
    rng: ChaCha8Rng,
}

impl NoiseStream {
    pub fn new(seed: u64, stream_index: u64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        Ok(Self {
            seed,
            stream_index,
            sqrt_dt: dt.sqrt(),
            rng,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    pub fn next_increment(&mut self) -> f64 {
        let z: f64 = self.rng.sample(StandardNormal);
        z * self.sqrt_dt
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Rouchon,
    EulerProjected,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub scheme: Scheme,
    #[serde(default = "default_tol")]
    pub tol_psd: f64,
    #[serde(default = "default_tol")]
    pub tol_tr: f64,
    /// Largest eigenvalue clipping accepted in one projected-Euler step.
    #[serde(default = "default_repair_budget")]
    pub repair_budget: f64,
    /// Largest cumulative clipping accepted over one trajectory.
    #[serde(default = "default_repair_budget")]
    pub repair_budget_total: f64,
}

fn default_tol() -> f64 {
    1e-9
}

fn default_repair_budget() -> f64 {
    1e-3
}

impl IntegratorConfig {
    pub fn new(dt: f64, scheme: Scheme) -> Result<Self> {
        let cfg = Self {
            dt,
            scheme,
            tol_psd: default_tol(),
            tol_tr: default_tol(),
            repair_budget: default_repair_budget(),
            repair_budget_total: default_repair_budget(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.repair_budget >= 0.0 && self.repair_budget_total >= 0.0) {
            return Err(Error::InvalidParameter("repair budgets must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInput {
    pub index: usize,
    pub gain: f64,
    pub dw: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutput {
    pub dy: f64,
    /// Sum of clipped negative eigenvalues (projected Euler only).
    pub repair: f64,
}

/// Pre-computed operators for one generator at a fixed `δt`.
#[derive(Clone, Debug)]
struct StepOperators {
    generator: LindbladGenerator,
    /// `I + δt(−iH − ½ΣL*L − ½C*C)`
    m0: CMat,
    /// `√η C`
    sqrt_eta_c: CMat,
    /// `√η (C + C*)`
    meas: CMat,
    /// `(A, A*)` for `A = √δt L_j` and `A = √(δt(1−η)) C`.
    jumps: Vec<(CMat, CMat)>,
}

impl StepOperators {
    fn new(g: &LindbladGenerator, dt: f64) -> Self {
        let n = g.dim();
        let ch = g.channel();
        let eta = ch.eta();
        let c = ch.c();
        let m0 = CMat::identity(n, n) + g.effective_drift().scale(dt);
        let mut jumps: Vec<(CMat, CMat)> = g
            .dissipation_ops()
            .iter()
            .map(|l| {
                let a = l.scale(dt.sqrt());
                let ad = a.adjoint();
                (a, ad)
            })
            .collect();
        if eta < 1.0 {
            let a = c.scale((dt * (1.0 - eta)).sqrt());
            let ad = a.adjoint();
            jumps.push((a, ad));
        }
        Self {
            generator: g.clone(),
            m0,
            sqrt_eta_c: c.scale(eta.sqrt()),
            meas: (c + c.adjoint()).scale(eta.sqrt()),
            jumps,
        }
    }
}

/// Work buffers reused across steps.
#[derive(Clone, Debug)]
struct Workspace {
    m: CMat,
    m_adj: CMat,
    tmp: CMat,
    out: CMat,
}

impl Workspace {
    fn new(n: usize) -> Self {
        let z = CMat::zeros(n, n);
        Self {
            m: z.clone(),
            m_adj: z.clone(),
            tmp: z.clone(),
            out: z,
        }
    }
}

fn hermitize_in_place(m: &mut CMat) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Cholesky test on a Hermitian matrix (lower triangle, conjugated inner
/// products). nalgebra's complex Cholesky accepts some indefinite inputs.
fn is_positive_definite(m: &CMat) -> bool {
    let n = m.nrows();
    let mut l = CMat::zeros(n, n);
    for j in 0..n {
        let d = m[(j, j)].re - (0..j).map(|k| l[(j, k)].norm_sqr()).sum::<f64>();
        if !(d > 0.0) {
            return false;
        }
        let djj = d.sqrt();
        l[(j, j)] = c64(djj, 0.0);
        for i in (j + 1)..n {
            let s = (0..j).fold(m[(i, j)], |acc, k| acc - l[(i, k)] * l[(j, k)].conj());
            l[(i, j)] = s / djj;
        }
    }
    true
}

/// Stepper for a fixed generator list and step size.
#[derive(Clone, Debug)]
pub struct Integrator {
    cfg: IntegratorConfig,
    ops: Vec<StepOperators>,
    work: Workspace,
}

impl Integrator {
    pub fn new(generators: &[LindbladGenerator], cfg: IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        let Some(first) = generators.first() else {
            return Err(Error::InvalidParameter("no generators to integrate".into()));
        };
        let n = first.dim();
        if let Some(g) = generators.iter().find(|g| g.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.dim(),
            });
        }
        let ops = generators.iter().map(|g| StepOperators::new(g, cfg.dt)).collect();
        Ok(Self {
            cfg,
            ops,
            work: Workspace::new(n),
        })
    }

    pub fn from_bank(bank: &GeneratorBank, cfg: IntegratorConfig) -> Result<Self> {
        Self::new(bank.generators(), cfg)
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.cfg
    }

    pub fn dim(&self) -> usize {
        self.work.m.nrows()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    fn check_input(&self, input: &StepInput, rho: &CMat) -> Result<()> {
        if input.index >= self.ops.len() {
            return Err(Error::InvalidParameter(format!(
                "generator index {} out of range",
                input.index
            )));
        }
        if !(input.gain >= 0.0) {
            return Err(Error::InvalidParameter(format!("gain {} < 0", input.gain)));
        }
        ensure_dim(rho, self.dim())
    }

    /// Step with the configured scheme, updating `rho` in place.
    pub fn step(&mut self, input: StepInput, rho: &mut CMat) -> Result<StepOutput> {
        match self.cfg.scheme {
            Scheme::Rouchon => self.step_rouchon(input, rho),
            Scheme::EulerProjected => self.step_euler_projected(input, rho),
        }
    }

    /// Positivity-preserving unit-gain step
    /// `ρ' ∝ MρM* + δt Σ L_jρL_j* + δt(1−η) CρC*` with
    /// `M = I + δt(−iH − ½ΣL*L − ½C*C) + √η C ΔY`.
    pub fn step_rouchon(&mut self, input: StepInput, rho: &mut CMat) -> Result<StepOutput> {
        self.check_input(&input, rho)?;
        if input.gain != 1.0 {
            return Err(Error::InvalidParameter(format!(
                "the Rouchon scheme needs unit gain, got {}",
                input.gain
            )));
        }
        let dt = self.cfg.dt;
        let ops = &self.ops[input.index];
        let w = &mut self.work;
        let dy = trace_product_re(&ops.meas, rho) * dt + input.dw;

        w.m.copy_from(&ops.m0);
        w.m.zip_apply(&ops.sqrt_eta_c, |x, c| *x += c * dy);
        w.m.adjoint_to(&mut w.m_adj);
        w.tmp.gemm(c64(1.0, 0.0), &w.m, rho, c64(0.0, 0.0));
        w.out.gemm(c64(1.0, 0.0), &w.tmp, &w.m_adj, c64(0.0, 0.0));
        for (a, ad) in &ops.jumps {
            w.tmp.gemm(c64(1.0, 0.0), a, rho, c64(0.0, 0.0));
            w.out.gemm(c64(1.0, 0.0), &w.tmp, ad, c64(1.0, 0.0));
        }
        let tr = trace_re(&w.out);
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::Step(format!(
                "normalization denominator {tr:.3e} is not positive"
            )));
        }
        w.out.unscale_mut(tr);
        hermitize_in_place(&mut w.out);
        std::mem::swap(rho, &mut w.out);
        Ok(StepOutput { dy, repair: 0.0 })
    }

    /// Gain-scaled Euler-Maruyama step `ρ + qL(ρ)δt + qG_C(ρ)ΔW`, projected
    /// back onto density matrices by clipping negative eigenvalues.
    pub fn step_euler_projected(&mut self, input: StepInput, rho: &mut CMat) -> Result<StepOutput> {
        self.check_input(&input, rho)?;
        let dt = self.cfg.dt;
        let ops = &self.ops[input.index];
        let expect = trace_product_re(&ops.meas, rho);
        let dy = expect * dt + input.dw;
        let q = input.gain;
        if q == 0.0 {
            return Ok(StepOutput { dy, repair: 0.0 });
        }
        let drift = ops.generator.apply_unchecked(rho);
        let sc = &ops.sqrt_eta_c;
        let innovation = sc * &*rho + &*rho * sc.adjoint() - rho.scale(expect);
        let mut raw = &*rho + drift.scale(q * dt) + innovation.scale(q * input.dw);
        hermitize_in_place(&mut raw);

        let repair = if is_positive_definite(&raw) {
            0.0
        } else {
            let (vals, vecs) = hermitian_eigen(&raw);
            let clipped: f64 = vals.iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
            if clipped > 0.0 {
                let d = CMat::from_diagonal(&vals.map(|v| c64(v.max(0.0), 0.0)));
                raw = &vecs * d * vecs.adjoint();
                hermitize_in_place(&mut raw);
            }
            clipped
        };
        if repair > self.cfg.repair_budget {
            return Err(Error::Step(format!(
                "eigenvalue repair {repair:.3e} exceeds the per-step budget {:.3e}",
                self.cfg.repair_budget
            )));
        }
        let tr = trace_re(&raw);
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::Step(format!("trace {tr:.3e} after projection is not positive")));
        }
        raw.unscale_mut(tr);
        *rho = raw;
        Ok(StepOutput { dy, repair })
    }
}

/// Generator index and gain applied on one integration step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Control {
    pub index: usize,
    pub gain: f64,
}

/// Closed- or open-loop switching driver consulted before every step.
pub trait Controller {
    fn control(&mut self, step: usize, t: f64, rho: &CMat) -> Result<Control>;

    /// Switching events emitted so far.
    fn take_events(&mut self) -> Vec<SwitchEvent>;
}

/// Quantities recorded along a trajectory.
#[derive(Clone, Debug)]
pub struct Observables {
    pub decomposition: SubspaceDecomposition,
    pub k: CMat,
}

/// Rounding floor for the off-target population check.
pub const POPULATION_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct TrajectoryOptions {
    pub n_steps: usize,
    pub record_stride: usize,
    /// Store full states at every recorded time.
    pub store_states: bool,
    /// Fail if `Tr(Π_R ρ(t))` turns negative beyond rounding (positive
    /// off-target population is guaranteed for invariant banks started off the
    /// target). Once a trajectory has converged, per-step rounding of order
    /// `1e-16` accumulates under the slow contraction to about `1e-12` of
    /// either sign; that passes.
    pub check_off_target_population: bool,
}

#[derive(Clone, Debug, Default)]
pub struct TrajectoryRecord {
    pub trajectory: usize,
    pub t: Vec<f64>,
    pub d_s: Vec<f64>,
    pub tr_k: Vec<f64>,
    /// Control applied on the step ending at the recorded time (the initial
    /// control for `t = 0`).
    pub active: Vec<usize>,
    pub gain: Vec<f64>,
    /// Measurement increment accumulated since the previous recorded time.
    pub dy: Vec<f64>,
    pub dw: Vec<f64>,
    pub states: Vec<CMat>,
    pub events: Vec<SwitchEvent>,
    pub repair_total: f64,
    pub final_state: CMat,
}

impl TrajectoryRecord {
    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, t: f64, rho: &CMat, obs: &Observables, ctl: Control, dy: f64, dw: f64, store: bool) {
        self.t.push(t);
        self.d_s.push(obs.decomposition.subspace_distance(rho));
        self.tr_k.push(trace_product_re(&obs.k, rho));
        self.active.push(ctl.index);
        self.gain.push(ctl.gain);
        self.dy.push(dy);
        self.dw.push(dw);
        if store {
            self.states.push(rho.clone());
        }
    }
}

/// Integrates one trajectory for `n_steps` steps, recording every
/// `record_stride` steps and at the final time.
pub fn simulate_trajectory(
    integrator: &mut Integrator,
    controller: &mut dyn Controller,
    rho0: &CMat,
    obs: &Observables,
    noise: &mut NoiseStream,
    opts: &TrajectoryOptions,
    trajectory: usize,
) -> Result<TrajectoryRecord> {
    ensure_dim(rho0, integrator.dim())?;
    if opts.record_stride == 0 {
        return Err(Error::InvalidParameter("record stride must be positive".into()));
    }
    let dt = integrator.config().dt;
    let wrap = |step: usize, e: Error| Error::Trajectory {
        trajectory,
        time: step as f64 * dt,
        source: Box::new(e),
    };
    let mut rho = rho0.clone();
    let mut rec = TrajectoryRecord {
        trajectory,
        ..Default::default()
    };
    let capacity = opts.n_steps / opts.record_stride + 2;
    rec.t.reserve(capacity);

    let mut ctl = controller.control(0, 0.0, &rho).map_err(|e| wrap(0, e))?;
    rec.push(0.0, &rho, obs, ctl, 0.0, 0.0, opts.store_states);
    let (mut acc_dy, mut acc_dw) = (0.0, 0.0);
    for n in 0..opts.n_steps {
        if n > 0 {
            ctl = controller.control(n, n as f64 * dt, &rho).map_err(|e| wrap(n, e))?;
        }
        let dw = noise.next_increment();
        let out = integrator
            .step(
                StepInput {
                    index: ctl.index,
                    gain: ctl.gain,
                    dw,
                },
                &mut rho,
            )
            .map_err(|e| wrap(n, e))?;
        rec.repair_total += out.repair;
        if rec.repair_total > integrator.config().repair_budget_total {
            return Err(wrap(
                n,
                Error::Step(format!(
                    "cumulative eigenvalue repair {:.3e} exceeds the budget {:.3e}",
                    rec.repair_total,
                    integrator.config().repair_budget_total
                )),
            ));
        }
        acc_dy += out.dy;
        acc_dw += dw;
        if opts.check_off_target_population && !(obs.decomposition.population_r(&rho) > -POPULATION_FLOOR) {
            return Err(wrap(
                n + 1,
                Error::AssumptionViolated {
                    assumption: "positive off-target population",
                    detail: format!("Tr(Π_R ρ) = {:.3e}", obs.decomposition.population_r(&rho)),
                },
            ));
        }
        let step = n + 1;
        if step % opts.record_stride == 0 || step == opts.n_steps {
            rec.push(step as f64 * dt, &rho, obs, ctl, acc_dy, acc_dw, opts.store_states);
            acc_dy = 0.0;
            acc_dw = 0.0;
        }
    }
    rec.events = controller.take_events();
    rec.final_state = rho;
    Ok(rec)
}
