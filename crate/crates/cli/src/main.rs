use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use qswitch_core::harness::{
    check_report, estimate_lyapunov_exponent, preset, read_summary_csv, run_experiment, ExperimentConfig,
};
use qswitch_core::switching::PolicyKind;

#[derive(Parser)]
#[command(
    name = "qswitch",
    version,
    about = "Switching feedback stabilization of monitored quantum systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a built-in configuration as JSON.
    Preset {
        /// One of: ghz3, spin32.
        name: String,
    },
    /// Report invariance, spectra, certificate and sampled decrease checks.
    Check { config: PathBuf },
    /// Build the Lyapunov operator, its rate and the dwell-time bounds.
    Certify { config: PathBuf },
    /// Simulate the trajectory ensemble and write the run directory.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trajectories: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the switching law (sigma1 ... sigma5).
        #[arg(long)]
        policy: Option<PolicyKind>,
        #[arg(long)]
        open_loop_compare: bool,
    },
    /// Re-estimate the decay exponent from a run directory.
    Exponent { run_dir: PathBuf },
}

fn print_json<T: serde::Serialize>(v: &T) -> anyhow::Result<()> {
    print_stdout(&serde_json::to_string_pretty(v)?)
}

// a closed pipe (`| head`) is not an error
fn print_stdout(text: &str) -> anyhow::Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn load(path: &Path) -> anyhow::Result<ExperimentConfig> {
    ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn check(path: &Path) -> anyhow::Result<bool> {
    let report = check_report(&load(path)?)?;
    print_json(&report)?;
    match &report.prerequisites {
        Ok(()) => eprintln!("checks: PASS"),
        Err(e) => eprintln!("checks: FAIL ({e})"),
    }
    Ok(report.passes())
}

fn certify(path: &Path) -> anyhow::Result<bool> {
    let report = check_report(&load(path)?)?;
    let Some(cert) = &report.certificate else {
        bail!("no certificate: {}", report.certificate_error.unwrap_or_default());
    };
    let out = serde_json::json!({
        "c": cert.c,
        "appendix_rate": cert.appendix_rate,
        "alpha_gamma": cert.alpha_gamma,
        "gamma": cert.gamma,
        "shift": cert.shift,
        "lambda_min": cert.lambda_min(),
        "lambda_max": cert.lambda_max(),
        "t_d": report.bounds.as_ref().map(|b| b.t_d),
        "bounds": report.bounds,
        "m_bar": report.modulation.as_ref().map(|m| m.m_bar),
        "certificate": cert,
    });
    print_json(&out)?;
    eprintln!("certificate: c = {:.6e}", cert.c);
    Ok(cert.c > 0.0)
}

fn run(
    path: &Path,
    seed: Option<u64>,
    trajectories: Option<usize>,
    out: Option<PathBuf>,
    policy: Option<PolicyKind>,
    open_loop_compare: bool,
) -> anyhow::Result<bool> {
    let mut cfg = load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(n) = trajectories {
        cfg.n_trajectories = n;
    }
    if let Some(p) = policy {
        cfg.policy.kind = p;
    }
    cfg.open_loop_compare |= open_loop_compare;
    cfg.validate()?;
    let dir = out.unwrap_or_else(|| PathBuf::from(format!("run_{}", cfg.name)));
    let output = run_experiment(&cfg, Some(&dir))?;
    print_json(&output.summary)?;
    eprintln!(
        "{} trajectories, final mean d_S {:.3e}, wall clock {:.1} s, output in {}",
        output.summary.n_trajectories,
        output.summary.final_mean_ds,
        output.wall_clock_seconds,
        dir.display()
    );
    eprintln!("checks: {}", flag(output.summary.checks_pass));
    Ok(output.summary.checks_pass)
}

fn exponent(dir: &Path) -> anyhow::Result<bool> {
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).context("reading manifest.json")?)?;
    let cfg: ExperimentConfig = serde_json::from_value(manifest["config"].clone()).context("config echo")?;
    let stats = read_summary_csv(&dir.join("summary.csv"))?;
    let t_final = cfg.t_final();
    let window = [cfg.fit_window[0] * t_final, cfg.fit_window[1] * t_final];
    let reference = manifest["summary"]["reference_rate"].as_f64().map(|r| -r);
    let est = estimate_lyapunov_exponent(&stats.t, &stats.mean_trk, window, reference)?;
    print_json(&est)?;
    eprintln!("exponent: {:.4e} ± {:.1e}", est.slope, est.stderr);
    Ok(est.pass.unwrap_or(true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Preset { name } => preset(&name).map_err(Into::into).and_then(|cfg| {
            print_stdout(&cfg.to_json()?)?;
            Ok(true)
        }),
        Command::Check { config } => check(&config),
        Command::Certify { config } => certify(&config),
        Command::Run {
            config,
            seed,
            trajectories,
            out,
            policy,
            open_loop_compare,
        } => run(&config, seed, trajectories, out, policy, open_loop_compare),
        Command::Exponent { run_dir } => exponent(&run_dir),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
