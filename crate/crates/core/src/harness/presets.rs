use nalgebra::DVector;

use super::config::{ExperimentConfig, GeneratorSpec, JsonMatrix, LyapunovSpec, TargetSpec};
use crate::error::{Error, Result};
use crate::lindblad::pauli;
use crate::operator::{c64, identity, ket_bra, kron, CMat, C64};
use crate::sme::{IntegratorConfig, Scheme};
use crate::switching::{PolicyConfig, PolicyKind, DEFAULT_EPSILON, DEFAULT_V_MAX};

pub const PRESET_NAMES: [&str; 2] = ["ghz3", "spin32"];

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    match name {
        "ghz3" => Ok(preset_ghz3()),
        "spin32" => Ok(preset_spin32()),
        other => Err(Error::Config(format!(
            "unknown preset {other:?}; expected one of {PRESET_NAMES:?}"
        ))),
    }
}

fn ket(n: usize, amps: &[(usize, C64)]) -> DVector<C64> {
    let mut v = DVector::zeros(n);
    for &(i, a) in amps {
        v[i] = a;
    }
    v
}

fn projector_of(v: &DVector<C64>) -> CMat {
    v * v.adjoint()
}

/// Three qubits stabilized to `(|000⟩ + |111⟩)/√2` by switching between two
/// engineered dissipators under a common `σ_z ⊗ I ⊗ σ_z` measurement.
pub fn preset_ghz3() -> ExperimentConfig {
    let i2 = identity(2);
    let (x, z) = (pauli::x(), pauli::z());
    let h = kron(&kron(&x, &i2), &i2) - kron(&i2, &kron(&x, &x));
    let l1 = kron(&(ket_bra(4, 0, 1) + ket_bra(4, 3, 2)), &i2);
    let l2 = kron(&i2, &(ket_bra(4, 0, 1) + ket_bra(4, 3, 2).map(|v| v * c64(0.0, 1.0))));
    let c = kron(&kron(&z, &i2), &z);
    let one = c64(1.0, 0.0);
    let ghz = ket(8, &[(0, one), (7, one)]).unscale(2f64.sqrt());
    let psi = ket(8, &[(1, one), (2, one), (5, one), (6, one)]);
    let rho0 = projector_of(&psi).unscale(4.0);
    let generator = |l: CMat| GeneratorSpec {
        h: h.clone().into(),
        l_ops: vec![l.into()],
        c: c.clone().into(),
        eta: 1.0,
    };
    let dt = 0.002;
    ExperimentConfig {
        name: "ghz3".into(),
        dim: 8,
        target: TargetSpec::State(projector_of(&ghz).into()),
        generators: vec![generator(l1), generator(l2)],
        rho0: rho0.into(),
        lyapunov: LyapunovSpec::Construct {
            gamma: Some(vec![0.5, 0.5]),
        },
        policy: PolicyConfig {
            kind: PolicyKind::Sigma3,
            epsilon: DEFAULT_EPSILON,
            dwell: Some(5.0 * dt),
            v_max: DEFAULT_V_MAX,
        },
        integrator: IntegratorConfig::new(dt, Scheme::Rouchon).expect("valid step"),
        n_steps: 25_000,
        n_trajectories: 200,
        seed: 20_240_601,
        record_stride: 10,
        dt_check: None,
        schedule_file: None,
        open_loop_compare: true,
        a2_samples: 10_000,
        fit_window: [0.2, 0.9],
        write_trajectories: true,
        threads: None,
    }
}

/// Four-level system stabilized to `span{|00⟩, |01⟩}` by gain-modulated
/// switching among two coherent and one dissipative generator.
pub fn preset_spin32() -> ExperimentConfig {
    let zero = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    let (i, mi) = (c64(0.0, 1.0), c64(0.0, -1.0));
    #[rustfmt::skip]
    let h = CMat::from_row_slice(4, 4, &[
        zero, zero, mi, zero,
        zero, zero, zero, zero,
        i, zero, zero, zero,
        zero, zero, zero, zero,
    ]);
    #[rustfmt::skip]
    let l = CMat::from_row_slice(4, 4, &[
        one, zero, one, zero,
        zero, one, zero, zero,
        zero, zero, zero, one,
        zero, zero, zero, zero,
    ]);
    let c = CMat::from_diagonal(&DVector::from_vec(vec![
        c64(2.0, 0.0),
        one,
        c64(-1.0, 0.0),
        c64(-2.0, 0.0),
    ]));
    let k = CMat::from_diagonal(&DVector::from_vec(vec![zero, zero, one, c64(2.0, 0.0)]));
    let target = ket_bra(4, 0, 0) + ket_bra(4, 1, 1);
    let psi = ket(4, &[(0, one), (3, one)]);
    let rho0 = projector_of(&psi).unscale(2.0);
    let gen = |h: CMat, l_ops: Vec<CMat>| GeneratorSpec {
        h: h.into(),
        l_ops: l_ops.into_iter().map(JsonMatrix).collect(),
        c: c.clone().into(),
        eta: 1.0,
    };
    let dt = 0.005;
    ExperimentConfig {
        name: "spin32".into(),
        dim: 4,
        target: TargetSpec::Projector(target.into()),
        generators: vec![gen(h.clone(), vec![]), gen(-h, vec![]), gen(CMat::zeros(4, 4), vec![l])],
        rho0: rho0.into(),
        lyapunov: LyapunovSpec::Given {
            k: k.into(),
            gamma: None,
        },
        policy: PolicyConfig {
            kind: PolicyKind::Sigma5,
            epsilon: DEFAULT_EPSILON,
            dwell: Some(100.0 * dt),
            v_max: DEFAULT_V_MAX,
        },
        // the first projected step from the pure initial state can clip
        // slightly more than the library default of 1e-3
        integrator: IntegratorConfig {
            repair_budget: 1e-2,
            repair_budget_total: 1e-2,
            ..IntegratorConfig::new(dt, Scheme::EulerProjected).expect("valid step")
        },
        n_steps: 5_000,
        n_trajectories: 500,
        seed: 20_240_602,
        record_stride: 10,
        dt_check: None,
        schedule_file: None,
        open_loop_compare: false,
        a2_samples: 10_000,
        fit_window: [0.2, 0.9],
        write_trajectories: true,
        threads: None,
    }
}
