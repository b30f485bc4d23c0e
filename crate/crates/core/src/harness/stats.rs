use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample mean and standard deviation (`n − 1` denominator; zero for `n = 1`).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Per-time mean and standard deviation over trajectories.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesStats {
    pub t: Vec<f64>,
    pub mean_ds: Vec<f64>,
    pub std_ds: Vec<f64>,
    pub mean_trk: Vec<f64>,
    pub std_trk: Vec<f64>,
    pub n: usize,
}

impl SeriesStats {
    /// Aggregates `(d_S, Tr(Kρ))` series sharing the time grid `t`.
    pub fn from_series(t: &[f64], ds: &[&[f64]], trk: &[&[f64]]) -> Result<Self> {
        let n = ds.len();
        if n == 0 || trk.len() != n {
            return Err(Error::InvalidParameter("need matching, non-empty series".into()));
        }
        if ds.iter().chain(trk.iter()).any(|s| s.len() != t.len()) {
            return Err(Error::InvalidParameter(
                "time grids of aggregated trajectories differ".into(),
            ));
        }
        let mut out = SeriesStats {
            t: t.to_vec(),
            n,
            ..Default::default()
        };
        let mut col = vec![0.0; n];
        for i in 0..t.len() {
            col.iter_mut().zip(ds).for_each(|(c, s)| *c = s[i]);
            let (m, s) = mean_std(&col);
            out.mean_ds.push(m);
            out.std_ds.push(s);
            col.iter_mut().zip(trk).for_each(|(c, s)| *c = s[i]);
            let (m, s) = mean_std(&col);
            out.mean_trk.push(m);
            out.std_trk.push(s);
        }
        Ok(out)
    }

    pub fn stderr_trk(&self, i: usize) -> f64 {
        self.std_trk[i] / (self.n as f64).sqrt()
    }

    pub fn stderr_ds(&self, i: usize) -> f64 {
        self.std_ds[i] / (self.n as f64).sqrt()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["t", "mean_dS", "std_dS", "mean_trK", "std_trK"])?;
        for i in 0..self.t.len() {
            w.serialize((
                self.t[i],
                self.mean_ds[i],
                self.std_ds[i],
                self.mean_trk[i],
                self.std_trk[i],
            ))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads `(t, mean_dS, std_dS, mean_trK, std_trK)` rows; `n` is left at zero.
pub fn read_summary_csv(path: &Path) -> Result<SeriesStats> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = SeriesStats::default();
    for row in r.deserialize() {
        let (t, mds, sds, mk, sk): (f64, f64, f64, f64, f64) = row?;
        out.t.push(t);
        out.mean_ds.push(mds);
        out.std_ds.push(sds);
        out.mean_trk.push(mk);
        out.std_trk.push(sk);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub n_points: usize,
    pub window: [f64; 2],
    /// Theoretical bound `−εc`, when a certificate is available.
    pub reference: Option<f64>,
    /// `slope ≤ reference + 3·stderr`.
    pub pass: Option<bool>,
}

/// Relative level of `mean Tr(Kρ)` treated as converged to rounding noise.
pub const FIT_FLOOR: f64 = 1e-10;

/// Least-squares slope of `log(mean Tr(Kρ))` over times in `[t_lo, t_hi]`.
///
/// Points after the mean first falls to `FIT_FLOOR·mean Tr(Kρ(0))` are
/// dropped. If that leaves fewer than 10 points in the window, the fit uses
/// every point before the cut instead. `window` in the result is the time
/// span actually fitted.
pub fn estimate_lyapunov_exponent(
    t: &[f64],
    mean_trk: &[f64],
    window: [f64; 2],
    reference: Option<f64>,
) -> Result<ExponentEstimate> {
    let n_all = t.len().min(mean_trk.len());
    let floor = mean_trk.first().map_or(0.0, |v0| FIT_FLOOR * v0.max(0.0));
    let cut = (0..n_all).find(|&i| !(mean_trk[i] > floor)).unwrap_or(n_all);
    let in_window: Vec<usize> = (0..cut).filter(|&i| t[i] >= window[0] && t[i] <= window[1]).collect();
    let idx = if in_window.len() < 10 && cut < n_all {
        (0..cut).collect()
    } else {
        in_window
    };
    if idx.len() < 10 {
        return Err(Error::WindowTooShort(idx.len()));
    }
    let pts: Vec<(f64, f64)> = idx.iter().map(|&i| (t[i], mean_trk[i])).collect();
    let window = [pts[0].0, pts[pts.len() - 1].0];
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1.ln() - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1.ln() - intercept - slope * p.0).powi(2)).sum();
    let stderr = (ssr / (n - 2.0) / sxx).sqrt();
    let pass = reference.map(|r| slope <= r + 3.0 * stderr);
    Ok(ExponentEstimate {
        slope,
        stderr,
        intercept,
        n_points: pts.len(),
        window,
        reference,
        pass,
    })
}

/// `mean Tr(Kρ(t)) ≤ Tr(Kρ0)e^{−rate·t} + 3·stderr(t)` at every recorded time.
pub fn exponential_bound_holds(stats: &SeriesStats, rate: f64) -> bool {
    let v0 = stats.mean_trk[0];
    (0..stats.t.len()).all(|i| stats.mean_trk[i] <= v0 * (-rate * stats.t[i]).exp() + 3.0 * stats.stderr_trk(i))
}
