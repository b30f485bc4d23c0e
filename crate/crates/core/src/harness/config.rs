use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::certificate::ConvexWeights;
use crate::error::{Error, Result};
use crate::lindblad::{GeneratorBank, LindbladGenerator, MeasurementChannel};
use crate::operator::{hermitian_eigen, serde_cmat, CMat, DensityMatrix, SubspaceDecomposition, C64};
use crate::sme::IntegratorConfig;
use crate::switching::PolicyConfig;

/// Complex matrix stored in JSON as rows of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct JsonMatrix(pub CMat);

impl Serialize for JsonMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_cmat::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for JsonMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        serde_cmat::deserialize(d).map(JsonMatrix)
    }
}

impl From<CMat> for JsonMatrix {
    fn from(m: CMat) -> Self {
        Self(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub h: JsonMatrix,
    #[serde(default)]
    pub l_ops: Vec<JsonMatrix>,
    pub c: JsonMatrix,
    pub eta: f64,
}

/// Target subspace given by its orthogonal projector, a spanning set of
/// vectors, or a target state whose support is the subspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSpec {
    Projector(JsonMatrix),
    Vectors(Vec<Vec<[f64; 2]>>),
    State(JsonMatrix),
}

/// Lyapunov operator: constructed from the convex combination with weights
/// `gamma` (uniform when absent), or given explicitly on the full space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LyapunovSpec {
    Construct {
        #[serde(default)]
        gamma: Option<Vec<f64>>,
    },
    Given {
        k: JsonMatrix,
        #[serde(default)]
        gamma: Option<Vec<f64>>,
    },
}

impl LyapunovSpec {
    pub fn gamma(&self, m: usize) -> Result<ConvexWeights> {
        let g = match self {
            Self::Construct { gamma } | Self::Given { gamma, .. } => gamma,
        };
        match g {
            Some(g) => ConvexWeights::new(g.clone()),
            None => Ok(ConvexWeights::uniform(m)),
        }
    }
}

fn default_record_stride() -> usize {
    10
}

fn default_a2_samples() -> usize {
    10_000
}

fn default_fit_window() -> [f64; 2] {
    [0.2, 0.9]
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub dim: usize,
    pub target: TargetSpec,
    pub generators: Vec<GeneratorSpec>,
    pub rho0: JsonMatrix,
    pub lyapunov: LyapunovSpec,
    pub policy: PolicyConfig,
    pub integrator: IntegratorConfig,
    pub n_steps: usize,
    pub n_trajectories: usize,
    pub seed: u64,
    #[serde(default = "default_record_stride")]
    pub record_stride: usize,
    /// Grid for the average-path schedules; defaults to the integration step.
    #[serde(default)]
    pub dt_check: Option<f64>,
    /// Replay this schedule instead of computing one (average-path laws).
    #[serde(default)]
    pub schedule_file: Option<PathBuf>,
    #[serde(default)]
    pub open_loop_compare: bool,
    #[serde(default = "default_a2_samples")]
    pub a2_samples: usize,
    /// Fit window for the exponent, as fractions of the horizon.
    #[serde(default = "default_fit_window")]
    pub fit_window: [f64; 2],
    #[serde(default = "default_true")]
    pub write_trajectories: bool,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn t_final(&self) -> f64 {
        self.n_steps as f64 * self.integrator.dt
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::Config(format!("dimension {} < 2", self.dim)));
        }
        if self.generators.is_empty() {
            return Err(Error::Config("no generators".into()));
        }
        if self.n_trajectories == 0 {
            return Err(Error::Config("n_trajectories must be at least 1".into()));
        }
        if self.n_steps == 0 || self.record_stride == 0 {
            return Err(Error::Config("n_steps and record_stride must be positive".into()));
        }
        let [a, b] = self.fit_window;
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(Error::Config(format!(
                "fit window {:?} is not a sub-interval of [0, 1]",
                self.fit_window
            )));
        }
        self.integrator.validate()?;
        self.policy.validate()?;
        let n = self.dim;
        let check = |what: &str, m: &CMat| {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Config(format!(
                    "{what} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            Ok(())
        };
        for (j, g) in self.generators.iter().enumerate() {
            check(&format!("H of generator {}", j + 1), &g.h.0)?;
            check(&format!("C of generator {}", j + 1), &g.c.0)?;
            for l in &g.l_ops {
                check(&format!("dissipation operator of generator {}", j + 1), &l.0)?;
            }
        }
        check("rho0", &self.rho0.0)?;
        match &self.target {
            TargetSpec::Projector(p) | TargetSpec::State(p) => check("target", &p.0)?,
            TargetSpec::Vectors(vs) => {
                if vs.is_empty() || vs.iter().any(|v| v.len() != n) {
                    return Err(Error::Config(format!(
                        "target vectors must be non-empty with length {n}"
                    )));
                }
            }
        }
        if let LyapunovSpec::Given { k, .. } = &self.lyapunov {
            check("K", &k.0)?;
        }
        Ok(())
    }

    pub fn bank(&self) -> Result<GeneratorBank> {
        let gens = self
            .generators
            .iter()
            .map(|g| {
                let ch = MeasurementChannel::new(g.c.0.clone(), g.eta)?;
                LindbladGenerator::new(g.h.0.clone(), g.l_ops.iter().map(|l| l.0.clone()).collect(), ch)
            })
            .collect::<Result<_>>()?;
        GeneratorBank::new(gens)
    }

    pub fn decomposition(&self) -> Result<SubspaceDecomposition> {
        match &self.target {
            TargetSpec::Projector(p) => SubspaceDecomposition::from_projector(&p.0),
            TargetSpec::Vectors(vs) => {
                let vecs: Vec<DVector<C64>> = vs
                    .iter()
                    .map(|v| DVector::from_iterator(v.len(), v.iter().map(|z| C64::new(z[0], z[1]))))
                    .collect();
                SubspaceDecomposition::from_target_vectors(&vecs)
            }
            TargetSpec::State(s) => {
                let rho = DensityMatrix::new(s.0.clone())?;
                let (vals, vecs) = hermitian_eigen(rho.matrix());
                let support: Vec<DVector<C64>> = (0..vals.len())
                    .filter(|&i| vals[i] > 1e-9)
                    .map(|i| vecs.column(i).into_owned())
                    .collect();
                SubspaceDecomposition::from_target_vectors(&support)
            }
        }
    }

    pub fn initial_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.rho0.0.clone())
    }
}
