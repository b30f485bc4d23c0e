//! Lyapunov certificates `K` with decay constant `c`, and the bounds derived
//! from them: l-bounds, dwell time `t_D`, modulation bound `M̄_K`, sampled
//! checks of the strict-decrease assumption and distance constants.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{abscissa_of, check_invariance, GeneratorBank, RestrictedGenerator, TOL_GAS};
use crate::operator::{
    hermitian_eigen, hermitian_eigenvalues, hermitian_function, hermitize, serde_cmat, trace_product_re, trace_re,
    CMat, HermitianBasis, SubspaceDecomposition,
};
use crate::sampling::{random_density, random_diagonal_density, rng_from_seed};

/// Minimum eigenvalue accepted for a positive-definite `K_R` (after scaling to `λ_max = 1`).
pub const TOL_PD: f64 = 1e-9;
/// Soundness tolerance on `K^{-1/2}(L*(K) + cK)K^{-1/2} ⪯ tol·I`.
pub const TOL_CERT: f64 = 1e-9;
/// Invariance residual tolerance used before building a certificate.
pub const TOL_INVARIANCE: f64 = 1e-9;
/// Absolute tie tolerance for the argmin over drift values.
pub const TOL_TIE: f64 = 1e-12;
/// Sampled strict-decrease check: a value `≥ −TOL_A2` counts as a violation.
pub const TOL_A2: f64 = 1e-12;
/// Off-target rejection threshold for sampled states.
pub const OFF_TARGET_MIN: f64 = 1e-6;

const MAX_ITER: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexWeights(Vec<f64>);

impl ConvexWeights {
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        let sum: f64 = gamma.iter().sum();
        if gamma.is_empty() || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("weights {gamma:?} do not sum to 1")));
        }
        // a single generator carries the full weight
        let open = gamma.len() == 1 || gamma.iter().all(|&g| g > 0.0 && g < 1.0);
        if !open {
            return Err(Error::InvalidParameter(format!("weights {gamma:?} not in (0, 1)")));
        }
        Ok(Self(gamma))
    }

    pub fn uniform(m: usize) -> Self {
        Self(vec![1.0 / m as f64; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `K_R^{-1/2}`, or an error when `K_R` is not positive definite.
fn inv_sqrt(k_r: &CMat) -> Result<CMat> {
    let min_eig = hermitian_eigenvalues(k_r).min();
    if !(min_eig > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eig });
    }
    Ok(hermitian_function(k_r, |x| 1.0 / x.sqrt()))
}

/// Extreme eigenvalues `(min, max)` of the pencil `(Y, K_R)`, i.e. of
/// `K_R^{-1/2} Y K_R^{-1/2}`.
pub fn pencil_bounds(y: &CMat, k_r: &CMat) -> Result<(f64, f64)> {
    let s = inv_sqrt(k_r)?;
    let ev = hermitian_eigenvalues(&hermitize(&(&s * y * &s)));
    Ok((ev.min(), ev.max()))
}

fn combined_restriction(
    bank: &GeneratorBank,
    d: &SubspaceDecomposition,
    gamma: &ConvexWeights,
) -> Result<RestrictedGenerator> {
    bank.convex_combination(gamma.as_slice())?.restricted(d)
}

/// Largest `c` with `L*_{γ,R}(K_R) ⪯ −c K_R`.
pub fn certified_rate(
    bank: &GeneratorBank,
    d: &SubspaceDecomposition,
    gamma: &ConvexWeights,
    k_r: &CMat,
) -> Result<f64> {
    let lr = combined_restriction(bank, d, gamma)?;
    let (_, max) = pencil_bounds(&lr.adjoint(k_r)?, k_r)?;
    Ok(-max)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateOptions {
    /// Maximum number of geometric steps when shifting `X` by `δ·I`.
    pub perturbation_steps: usize,
    pub perturbation_factor: f64,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            perturbation_steps: 60,
            perturbation_factor: 2.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LyapunovCertificate {
    #[serde(with = "serde_cmat")]
    pub k_r: CMat,
    #[serde(with = "serde_cmat")]
    pub k: CMat,
    /// Decay constant: `L*_{γ,R}(K_R) ⪯ −c K_R`.
    pub c: f64,
    pub gamma: ConvexWeights,
    /// Spectral abscissa of `L_{γ,R}`.
    pub alpha_gamma: f64,
    /// `−λ_max(L*_{γ,R}(K_R)) / λ_max(K_R)`, a coarser admissible constant.
    pub appendix_rate: f64,
    /// Identity shift applied to reach positive definiteness.
    pub shift: f64,
    /// Geometric multiplicity of `−α_γ`.
    pub multiplicity: usize,
}

impl LyapunovCertificate {
    /// Certificate for a user-supplied `K_R`; `c` is the certified rate, which
    /// may be non-positive when the bank admits no decay for this `K`.
    pub fn from_k_r(bank: &GeneratorBank, d: &SubspaceDecomposition, gamma: ConvexWeights, k_r: CMat) -> Result<Self> {
        let lr = combined_restriction(bank, d, &gamma)?;
        let (_, max) = pencil_bounds(&lr.adjoint(&k_r)?, &k_r)?;
        let basis = HermitianBasis::gell_mann(d.dim_r());
        let (alpha_gamma, _) = abscissa_of(&lr.matrix(&basis)?)?;
        let appendix_rate = -hermitian_eigenvalues(&lr.adjoint(&k_r)?).max() / hermitian_eigenvalues(&k_r).max();
        let k = d.extend_r(&k_r)?;
        Ok(Self {
            k_r,
            k,
            c: -max,
            gamma,
            alpha_gamma,
            appendix_rate,
            shift: 0.0,
            multiplicity: 0,
        })
    }

    pub fn lambda_min(&self) -> f64 {
        hermitian_eigenvalues(&self.k_r).min()
    }

    pub fn lambda_max(&self) -> f64 {
        hermitian_eigenvalues(&self.k_r).max()
    }

    /// Copy with `K_R` scaled by `s > 0`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            k_r: self.k_r.scale(s),
            k: self.k.scale(s),
            ..self.clone()
        }
    }

    /// `λ_max(K^{-1/2}(L*_{γ,R}(K_R) + cK_R)K^{-1/2})`, at most `TOL_CERT` for a sound certificate.
    pub fn soundness_residual(&self, bank: &GeneratorBank, d: &SubspaceDecomposition) -> Result<f64> {
        let lr = combined_restriction(bank, d, &self.gamma)?;
        let y = lr.adjoint(&self.k_r)? + self.k_r.scale(self.c);
        Ok(pencil_bounds(&y, &self.k_r)?.1)
    }
}

/// Builds `K_R` from the eigenvectors of `L*_{γ,R}` for the eigenvalue
/// `−α_γ`, combined with weights `β̄_k ∝ Tr(X_k)` and shifted by `δ·I` when
/// the combination is not positive definite.
pub fn build_certificate(
    bank: &GeneratorBank,
    d: &SubspaceDecomposition,
    gamma: &ConvexWeights,
    opts: &CertificateOptions,
) -> Result<LyapunovCertificate> {
    for (index, g) in bank.generators().iter().enumerate() {
        let rep = check_invariance(g, d, TOL_INVARIANCE)?;
        if !rep.invariant {
            return Err(Error::NotInvariant {
                index,
                residual: rep.max_residual(),
            });
        }
    }
    let lr = combined_restriction(bank, d, gamma)?;
    let basis = HermitianBasis::gell_mann(d.dim_r());
    let m = lr.adjoint_matrix(&basis)?;
    let (alpha, _) = abscissa_of(&m)?;
    if !(alpha > TOL_GAS) {
        return Err(Error::NotGas { alpha });
    }

    let eigvecs = null_space(&(&m + nalgebra::DMatrix::identity(m.nrows(), m.ncols()).scale(alpha)))?;
    let xs: Vec<CMat> = eigvecs
        .iter()
        .map(|v| basis.devectorize(v).map(|x| hermitize(&x)))
        .collect::<Result<_>>()?;
    let traces: Vec<f64> = xs.iter().map(trace_re).collect();
    let norm = traces.iter().map(|t| t * t).sum::<f64>().sqrt();
    if !(norm > 1e-12) {
        return Err(Error::Eigen("eigenvectors for −α_γ are traceless".into()));
    }
    let mut x = CMat::zeros(d.dim_r(), d.dim_r());
    for (xk, tk) in xs.iter().zip(&traces) {
        x += xk.scale(tk / norm);
    }
    let spectral = hermitian_eigenvalues(&x).iter().fold(0.0f64, |a, v| a.max(v.abs()));
    x.unscale_mut(spectral);

    let accept = |xt: &CMat| -> Result<bool> {
        let pd = hermitian_eigenvalues(xt).min() > TOL_PD;
        Ok(pd && hermitian_eigenvalues(&lr.adjoint(xt)?).max() < -TOL_CERT)
    };
    let mut shift = 0.0;
    let mut x_tilde = x.clone();
    if !accept(&x_tilde)? {
        let id = CMat::identity(d.dim_r(), d.dim_r());
        let mut delta = 1e-8;
        let mut found = false;
        for _ in 0..opts.perturbation_steps {
            let cand = &x + id.scale(delta);
            if accept(&cand)? {
                x_tilde = cand;
                shift = delta;
                found = true;
                break;
            }
            delta *= opts.perturbation_factor;
        }
        if !found {
            return Err(Error::PerturbationFailed {
                steps: opts.perturbation_steps,
            });
        }
    }
    let k_r = x_tilde.unscale(hermitian_eigenvalues(&x_tilde).max());
    let mut cert = LyapunovCertificate::from_k_r(bank, d, gamma.clone(), k_r)?;
    cert.shift = shift;
    cert.multiplicity = xs.len();
    cert.alpha_gamma = alpha;
    if !(cert.c > 0.0) {
        return Err(Error::NotGas { alpha: cert.c });
    }
    let residual = cert.soundness_residual(bank, d)?;
    if residual > TOL_CERT {
        return Err(Error::Eigen(format!(
            "certificate residual {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(cert)
}

/// Orthonormal basis of the numerical null space of a real square matrix.
fn null_space(a: &nalgebra::DMatrix<f64>) -> Result<Vec<nalgebra::DVector<f64>>> {
    let n = a.nrows();
    let svd = a
        .clone()
        .try_svd(false, true, f64::EPSILON, MAX_ITER)
        .ok_or_else(|| Error::Eigen("SVD did not converge".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::Eigen("SVD failed".into()))?;
    let scale = svd.singular_values.max().max(1.0);
    let tol = 1e-7 * scale;
    let out: Vec<_> = (0..n)
        .filter(|&i| svd.singular_values[i] <= tol)
        .map(|i| v_t.row(i).transpose())
        .collect();
    if out.is_empty() {
        return Err(Error::Eigen("abscissa is attained only by non-real eigenvalues".into()));
    }
    Ok(out)
}

/// Pre-computed `L_k*(K)` so that `Tr(K L_k(ρ)) = Tr(L_k*(K) ρ)` costs `O(N²)`.
#[derive(Clone, Debug)]
pub struct DriftTable {
    k: CMat,
    adjoint_k: Vec<CMat>,
}

impl DriftTable {
    pub fn new(bank: &GeneratorBank, k: &CMat) -> Result<Self> {
        let adjoint_k = bank.generators().iter().map(|g| g.adjoint(k)).collect::<Result<_>>()?;
        Ok(Self {
            k: k.clone(),
            adjoint_k,
        })
    }

    pub fn len(&self) -> usize {
        self.adjoint_k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjoint_k.is_empty()
    }

    pub fn k(&self) -> &CMat {
        &self.k
    }

    /// `Tr(Kρ)`.
    pub fn value(&self, rho: &CMat) -> f64 {
        trace_product_re(&self.k, rho)
    }

    /// `Tr(K L_j(ρ))`.
    pub fn drift(&self, j: usize, rho: &CMat) -> f64 {
        trace_product_re(&self.adjoint_k[j], rho)
    }

    pub fn drifts(&self, rho: &CMat) -> Vec<f64> {
        (0..self.len()).map(|j| self.drift(j, rho)).collect()
    }

    /// `(min_k Tr(K L_k(ρ)), smallest index attaining it within TOL_TIE)`.
    pub fn min_drift(&self, rho: &CMat) -> (f64, usize) {
        argmin_with_ties(&self.drifts(rho))
    }
}

/// Minimum value and the smallest index whose value is within `TOL_TIE` of it.
pub fn argmin_with_ties(values: &[f64]) -> (f64, usize) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let idx = values.iter().position(|&v| v <= min + TOL_TIE).unwrap_or(0);
    (min, idx)
}

/// `(min_k Tr(K L_k(ρ)), argmin)` with 0-based index.
pub fn min_drift(bank: &GeneratorBank, k: &CMat, rho: &CMat) -> Result<(f64, usize)> {
    Ok(DriftTable::new(bank, k)?.min_drift(rho))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DwellTimeBounds {
    pub l_upper: Vec<f64>,
    pub l_lower: Vec<f64>,
    pub l2_upper: Vec<f64>,
    pub l2_lower: Vec<f64>,
    pub l: Vec<f64>,
    pub l2: Vec<f64>,
    pub epsilon: f64,
    pub t_d: f64,
}

/// l-bounds of every generator against `K_R` and the dwell-time lower bound
/// `t_D = min_k c(1−ε) / (l_{k,2} + εc l_k) · λ_min(K_R)/λ_max(K_R)`.
pub fn compute_l_bounds(
    bank: &GeneratorBank,
    d: &SubspaceDecomposition,
    cert: &LyapunovCertificate,
    epsilon: f64,
) -> Result<DwellTimeBounds> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} not in (0, 1)")));
    }
    let m = bank.len();
    let mut b = DwellTimeBounds {
        l_upper: Vec::with_capacity(m),
        l_lower: Vec::with_capacity(m),
        l2_upper: Vec::with_capacity(m),
        l2_lower: Vec::with_capacity(m),
        l: Vec::with_capacity(m),
        l2: Vec::with_capacity(m),
        epsilon,
        t_d: f64::INFINITY,
    };
    let ratio = cert.lambda_min() / cert.lambda_max();
    let c = cert.c;
    for g in bank.generators() {
        let lr = g.restricted(d)?;
        let y1 = lr.adjoint(&cert.k_r)?;
        let y2 = lr.adjoint(&y1)?;
        let (lo1, hi1) = pencil_bounds(&y1, &cert.k_r)?;
        let (lo2, hi2) = pencil_bounds(&y2, &cert.k_r)?;
        let l = hi1.abs().max(lo1.abs());
        let l2 = hi2.abs().max(lo2.abs());
        b.l_upper.push(hi1);
        b.l_lower.push(lo1);
        b.l2_upper.push(hi2);
        b.l2_lower.push(lo2);
        b.l.push(l);
        b.l2.push(l2);
        let t = c * (1.0 - epsilon) / (l2 + epsilon * c * l) * ratio;
        b.t_d = b.t_d.min(t);
    }
    Ok(b)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ModulationBound {
    pub m_bar: f64,
}

/// `M̄_K = max_k ‖(L_k*)²(K)‖_F`, an upper bound on `Tr(K L_k²(ρ))` over states.
pub fn compute_modulation_bound(bank: &GeneratorBank, k: &CMat) -> Result<ModulationBound> {
    let mut m_bar = 0.0f64;
    for g in bank.generators() {
        let y = g.adjoint(&g.adjoint(k)?)?;
        m_bar = m_bar.max(y.norm());
    }
    Ok(ModulationBound { m_bar })
}

#[derive(Clone, Debug, Serialize)]
pub struct A2Report {
    pub samples: usize,
    pub violations: usize,
    /// Largest sampled `min_k Tr(K L_k(ρ))`; negative when no violation was found.
    pub max_drift: f64,
    /// Largest sampled `min_k Tr(K L_k(ρ)) / Tr(Kρ)`.
    pub max_relative_drift: f64,
}

/// Sampled falsification of `min_k Tr(K L_k(ρ)) < 0` off the target.
///
/// Even-numbered samples are Hilbert-Schmidt distributed; odd-numbered ones
/// are diagonal in the working basis, which reaches the measure-zero faces
/// where coherent drifts vanish.
pub fn check_a2_sampled(
    bank: &GeneratorBank,
    k: &CMat,
    d: &SubspaceDecomposition,
    n_samples: usize,
    seed: u64,
) -> Result<A2Report> {
    let table = DriftTable::new(bank, k)?;
    let mut rng = rng_from_seed(seed);
    let n = d.dim();
    let mut report = A2Report {
        samples: 0,
        violations: 0,
        max_drift: f64::NEG_INFINITY,
        max_relative_drift: f64::NEG_INFINITY,
    };
    while report.samples < n_samples {
        let rho = sample_off_target(&mut rng, n, d, report.samples);
        let (value, _) = table.min_drift(&rho);
        if value >= -TOL_A2 {
            report.violations += 1;
        }
        report.max_drift = report.max_drift.max(value);
        let v = table.value(&rho);
        if v > 0.0 {
            report.max_relative_drift = report.max_relative_drift.max(value / v);
        }
        report.samples += 1;
    }
    Ok(report)
}

pub(crate) fn sample_off_target<R: Rng>(rng: &mut R, n: usize, d: &SubspaceDecomposition, i: usize) -> CMat {
    loop {
        let rho = if i.is_multiple_of(2) {
            random_density(rng, n)
        } else {
            random_diagonal_density(rng, n)
        };
        if d.population_r(&rho) > OFF_TARGET_MIN {
            return rho;
        }
    }
}

/// Constants of `c1 Tr(Kρ) ≤ ‖ρ − Π_S ρ Π_S‖₁ ≤ c2 √Tr(Kρ)`:
/// `c1 = 1/λ_max(K_R)`, `c2 = 3N/√λ_min(K_R)`.
pub fn distance_constants(k_r: &CMat, n: usize) -> Result<(f64, f64)> {
    let (vals, _) = hermitian_eigen(k_r);
    let (lo, hi) = (vals.min(), vals.max());
    if !(lo > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eig: lo });
    }
    Ok((1.0 / hi, 3.0 * n as f64 / lo.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{LindbladGenerator, MeasurementChannel};
    use crate::operator::{c64, ket_bra, zeros};

    fn decay_bank() -> (GeneratorBank, SubspaceDecomposition) {
        let ch = MeasurementChannel::new(ket_bra(2, 0, 1), 1.0).unwrap();
        let g = LindbladGenerator::new(zeros(2), vec![], ch).unwrap();
        let d = SubspaceDecomposition::from_projector(&ket_bra(2, 0, 0)).unwrap();
        (GeneratorBank::new(vec![g]).unwrap(), d)
    }

    fn one() -> CMat {
        CMat::from_element(1, 1, c64(1.0, 0.0))
    }

    #[test]
    fn decay_certificate_is_scalar() {
        let (bank, d) = decay_bank();
        let cert = build_certificate(&bank, &d, &ConvexWeights::uniform(1), &Default::default()).unwrap();
        assert!((cert.k_r[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((cert.alpha_gamma - 1.0).abs() < 1e-12);
        assert!((cert.c - 1.0).abs() < 1e-12);
        assert_eq!(cert.multiplicity, 1);
    }

    #[test]
    fn certified_rate_examples() {
        let (bank, d) = decay_bank();
        let c = certified_rate(&bank, &d, &ConvexWeights::uniform(1), &one()).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        let null = GeneratorBank::new(vec![LindbladGenerator::null(2)]).unwrap();
        let c = certified_rate(&null, &d, &ConvexWeights::uniform(1), &one()).unwrap();
        assert_eq!(c, 0.0);
        assert!(matches!(
            certified_rate(&bank, &d, &ConvexWeights::uniform(1), &zeros(1)),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn decay_dwell_time() {
        let (bank, d) = decay_bank();
        let cert = build_certificate(&bank, &d, &ConvexWeights::uniform(1), &Default::default()).unwrap();
        let b = compute_l_bounds(&bank, &d, &cert, 0.3).unwrap();
        assert!((b.l_upper[0] + 1.0).abs() < 1e-12 && (b.l_lower[0] + 1.0).abs() < 1e-12);
        assert!((b.l2[0] - 1.0).abs() < 1e-12);
        assert!((b.t_d - 0.7 / 1.3).abs() < 1e-12);
        assert!(compute_l_bounds(&bank, &d, &cert, 1.0).is_err());
    }

    #[test]
    fn dwell_time_decreases_in_epsilon() {
        let (bank, d) = decay_bank();
        let cert = build_certificate(&bank, &d, &ConvexWeights::uniform(1), &Default::default()).unwrap();
        let mut last = f64::INFINITY;
        for i in 1..100 {
            let t = compute_l_bounds(&bank, &d, &cert, i as f64 / 100.0).unwrap().t_d;
            assert!(t < last && t > 0.0);
            last = t;
        }
    }

    #[test]
    fn modulation_bound_examples() {
        let (bank, _) = decay_bank();
        let k = ket_bra(2, 1, 1);
        assert!((compute_modulation_bound(&bank, &k).unwrap().m_bar - 1.0).abs() < 1e-14);
        let null = GeneratorBank::new(vec![LindbladGenerator::null(2)]).unwrap();
        assert_eq!(compute_modulation_bound(&null, &k).unwrap().m_bar, 0.0);
    }

    #[test]
    fn min_drift_examples() {
        let (bank, d) = decay_bank();
        let k = d.extend_r(&one()).unwrap();
        let (v, i) = min_drift(&bank, &k, &ket_bra(2, 0, 0)).unwrap();
        assert_eq!((v, i), (0.0, 0));
        let (v, _) = min_drift(&bank, &k, &ket_bra(2, 1, 1)).unwrap();
        assert!((v + 1.0).abs() < 1e-14);
    }

    #[test]
    fn argmin_ties_pick_smallest_index() {
        assert_eq!(argmin_with_ties(&[-1.0, -1.0, 0.0]).1, 0);
        assert_eq!(argmin_with_ties(&[0.0, -1.0, -1.0 + 1e-13]).1, 1);
        assert_eq!(argmin_with_ties(&[0.0, -1.0 + 1e-13, -1.0]).1, 1);
        assert_eq!(argmin_with_ties(&[0.0, -1.0 + 1e-9, -1.0]).1, 2);
    }

    #[test]
    fn distance_constant_examples() {
        let (c1, c2) = distance_constants(&CMat::identity(2, 2), 4).unwrap();
        assert_eq!((c1, c2), (1.0, 12.0));
        let k = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c64(1.0, 0.0), c64(2.0, 0.0)]));
        let (c1, c2) = distance_constants(&k, 4).unwrap();
        assert_eq!((c1, c2), (0.5, 12.0));
        assert!(distance_constants(&zeros(2), 4).is_err());
    }

    #[test]
    fn non_invariant_bank_is_rejected() {
        let ch = MeasurementChannel::new(ket_bra(2, 1, 0), 1.0).unwrap();
        let g = LindbladGenerator::new(zeros(2), vec![], ch).unwrap();
        let bank = GeneratorBank::new(vec![g]).unwrap();
        let d = SubspaceDecomposition::from_projector(&ket_bra(2, 0, 0)).unwrap();
        let err = build_certificate(&bank, &d, &ConvexWeights::uniform(1), &Default::default());
        assert!(matches!(err, Err(Error::NotInvariant { index: 0, .. })));
    }

    #[test]
    fn not_gas_is_rejected() {
        let null = GeneratorBank::new(vec![LindbladGenerator::null(2)]).unwrap();
        let d = SubspaceDecomposition::from_projector(&ket_bra(2, 0, 0)).unwrap();
        let err = build_certificate(&null, &d, &ConvexWeights::uniform(1), &Default::default());
        assert!(matches!(err, Err(Error::NotGas { .. })));
    }

    #[test]
    fn convex_weights_validation() {
        assert!(ConvexWeights::new(vec![0.5, 0.5]).is_ok());
        assert!(ConvexWeights::new(vec![1.0]).is_ok());
        assert!(ConvexWeights::new(vec![1.0, 0.0]).is_err());
        assert!(ConvexWeights::new(vec![0.6, 0.6]).is_err());
    }
}
