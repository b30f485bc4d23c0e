//! Experiment configuration, presets, Monte Carlo orchestration and
//! statistics.

mod config;
mod presets;
mod run;
mod stats;

pub use config::{ExperimentConfig, GeneratorSpec, JsonMatrix, LyapunovSpec, TargetSpec};
pub use presets::{preset, preset_ghz3, preset_spin32, PRESET_NAMES};
pub use run::{
    check_report, prepare, run_experiment, CheckReport, DwellDecrease, Prepared, RunOutput, RunSummary, SwitchStats,
};
pub use stats::{
    estimate_lyapunov_exponent, exponential_bound_holds, mean_std, read_summary_csv, ExponentEstimate, SeriesStats,
};
