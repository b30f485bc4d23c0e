//! Lindblad generators, their adjoints and R-block restrictions, the block
//! invariance conditions, spectral abscissae and semigroup propagation.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::operator::{
    c64, ensure_dim, hermiticity_error, identity, zeros, CMat, DensityMatrix, HermitianBasis, RMat,
    SubspaceDecomposition, C64, TOL_HERM,
};

/// GAS threshold on the spectral abscissa.
pub const TOL_GAS: f64 = 1e-9;
/// Relative tolerance when grouping eigenvalues that attain the abscissa.
pub const TOL_CLUSTER: f64 = 1e-9;

/// `A ρ A* − ½{A*A, ρ}`.
pub fn dissipator(a: &CMat, rho: &CMat) -> Result<CMat> {
    ensure_dim(rho, a.nrows())?;
    let ada = a.adjoint() * a;
    Ok(dissipator_with(a, &ada, rho))
}

fn dissipator_with(a: &CMat, ada: &CMat, rho: &CMat) -> CMat {
    a * rho * a.adjoint() - (ada * rho + rho * ada).scale(0.5)
}

fn dissipator_adjoint_with(a: &CMat, ada: &CMat, x: &CMat) -> CMat {
    a.adjoint() * x * a - (ada * x + x * ada).scale(0.5)
}

/// Measured noise operator `C` with detector efficiency `η ∈ (0, 1]`.
#[derive(Clone, Debug)]
pub struct MeasurementChannel {
    c: CMat,
    eta: f64,
}

impl MeasurementChannel {
    pub fn new(c: CMat, eta: f64) -> Result<Self> {
        if c.nrows() != c.ncols() {
            return Err(Error::DimensionMismatch {
                expected: c.nrows(),
                got: c.ncols(),
            });
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!("eta = {eta} not in (0, 1]")));
        }
        Ok(Self { c, eta })
    }

    pub fn c(&self) -> &CMat {
        &self.c
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn dim(&self) -> usize {
        self.c.nrows()
    }

    fn same_as(&self, other: &Self) -> bool {
        self.eta == other.eta && (&self.c - &other.c).norm() <= 1e-12 * (1.0 + self.c.norm())
    }
}

/// `L(ρ) = −i[H, ρ] + Σ_j D_{L_j}(ρ) + D_C(ρ)`.
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    h: CMat,
    l_ops: Vec<CMat>,
    channel: MeasurementChannel,
    // cached L_j* L_j and C* C
    l_dag_l: Vec<CMat>,
    c_dag_c: CMat,
}

impl LindbladGenerator {
    pub fn new(h: CMat, l_ops: Vec<CMat>, channel: MeasurementChannel) -> Result<Self> {
        let n = channel.dim();
        ensure_dim(&h, n)?;
        for l in &l_ops {
            ensure_dim(l, n)?;
        }
        let herm = hermiticity_error(&h);
        if herm > TOL_HERM * (1.0 + h.norm()) {
            return Err(Error::InvalidOperator(format!(
                "Hamiltonian not Hermitian (error {herm:.3e})"
            )));
        }
        let l_dag_l = l_ops.iter().map(|l| l.adjoint() * l).collect();
        let c_dag_c = channel.c.adjoint() * &channel.c;
        Ok(Self {
            h,
            l_ops,
            channel,
            l_dag_l,
            c_dag_c,
        })
    }

    /// `H = 0`, no dissipation, `C = 0`.
    pub fn null(n: usize) -> Self {
        let channel = MeasurementChannel::new(zeros(n), 1.0).expect("valid channel");
        Self::new(zeros(n), Vec::new(), channel).expect("valid generator")
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.h
    }

    pub fn dissipation_ops(&self) -> &[CMat] {
        &self.l_ops
    }

    pub fn channel(&self) -> &MeasurementChannel {
        &self.channel
    }

    /// Non-Hermitian effective part `−iH − ½ Σ L_j*L_j − ½ C*C`.
    pub fn effective_drift(&self) -> CMat {
        let mut a = self.h.map(|z| z * c64(0.0, -1.0));
        for ll in &self.l_dag_l {
            a -= ll.scale(0.5);
        }
        a - self.c_dag_c.scale(0.5)
    }

    pub fn apply(&self, rho: &CMat) -> Result<CMat> {
        ensure_dim(rho, self.dim())?;
        Ok(self.apply_unchecked(rho))
    }

    pub(crate) fn apply_unchecked(&self, rho: &CMat) -> CMat {
        let hr = &self.h * rho;
        // −i[H, ρ] = −i(Hρ − ρH), with ρH = (Hρ)* for Hermitian ρ
        let mut out = (&hr - rho * &self.h).map(|z| z * c64(0.0, -1.0));
        for (l, ll) in self.l_ops.iter().zip(&self.l_dag_l) {
            out += dissipator_with(l, ll, rho);
        }
        out + dissipator_with(&self.channel.c, &self.c_dag_c, rho)
    }

    /// Hilbert-Schmidt adjoint `L*(X)`.
    pub fn adjoint(&self, x: &CMat) -> Result<CMat> {
        ensure_dim(x, self.dim())?;
        Ok(self.adjoint_unchecked(x))
    }

    pub(crate) fn adjoint_unchecked(&self, x: &CMat) -> CMat {
        let mut out = (&self.h * x - x * &self.h).map(|z| z * c64(0.0, 1.0));
        for (l, ll) in self.l_ops.iter().zip(&self.l_dag_l) {
            out += dissipator_adjoint_with(l, ll, x);
        }
        out + dissipator_adjoint_with(&self.channel.c, &self.c_dag_c, x)
    }

    /// Restriction `L_R` acting on `H_R` operators.
    pub fn restricted(&self, d: &SubspaceDecomposition) -> Result<RestrictedGenerator> {
        ensure_dim(&self.h, d.dim())?;
        let h_r = d.block_decompose(&self.h)?.r;
        let mut terms = Vec::with_capacity(self.l_ops.len() + 1);
        for a in self.l_ops.iter().chain(std::iter::once(&self.channel.c)) {
            let b = d.block_decompose(a)?;
            let damping = b.p.adjoint() * &b.p + b.r.adjoint() * &b.r;
            terms.push(RestrictedTerm { a_r: b.r, damping });
        }
        Ok(RestrictedGenerator { h_r, terms })
    }

    /// Real matrix of `L` in a Hermitian basis of the full space.
    pub fn superoperator(&self, basis: &HermitianBasis) -> Result<RMat> {
        if basis.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: basis.dim(),
            });
        }
        basis.superoperator_matrix(|x| self.apply_unchecked(x))
    }
}

#[derive(Clone, Debug)]
struct RestrictedTerm {
    a_r: CMat,
    /// `A_P* A_P + A_R* A_R`
    damping: CMat,
}

/// `L_R(ρ_R) = −i[H_R, ρ_R] + Σ_A (A_R ρ_R A_R* − ½{A_P*A_P + A_R*A_R, ρ_R})`.
#[derive(Clone, Debug)]
pub struct RestrictedGenerator {
    h_r: CMat,
    terms: Vec<RestrictedTerm>,
}

impl RestrictedGenerator {
    pub fn dim(&self) -> usize {
        self.h_r.nrows()
    }

    pub fn apply(&self, rho_r: &CMat) -> Result<CMat> {
        ensure_dim(rho_r, self.dim())?;
        let mut out = (&self.h_r * rho_r - rho_r * &self.h_r).map(|z| z * c64(0.0, -1.0));
        for t in &self.terms {
            out += dissipator_with(&t.a_r, &t.damping, rho_r);
        }
        Ok(out)
    }

    pub fn adjoint(&self, x_r: &CMat) -> Result<CMat> {
        ensure_dim(x_r, self.dim())?;
        let mut out = (&self.h_r * x_r - x_r * &self.h_r).map(|z| z * c64(0.0, 1.0));
        for t in &self.terms {
            out += dissipator_adjoint_with(&t.a_r, &t.damping, x_r);
        }
        Ok(out)
    }

    /// Real matrix of `L_R` in the Hermitian basis of `H_R`.
    pub fn matrix(&self, basis: &HermitianBasis) -> Result<RMat> {
        basis.superoperator_matrix(|x| self.apply(x).unwrap_or_else(|_| zeros(x.nrows())))
    }

    /// Real matrix of `L_R*` in the Hermitian basis of `H_R`.
    pub fn adjoint_matrix(&self, basis: &HermitianBasis) -> Result<RMat> {
        basis.superoperator_matrix(|x| self.adjoint(x).unwrap_or_else(|_| zeros(x.nrows())))
    }
}

/// Ordered list of generators sharing one measurement channel.
#[derive(Clone, Debug)]
pub struct GeneratorBank {
    generators: Vec<LindbladGenerator>,
}

impl GeneratorBank {
    pub fn new(generators: Vec<LindbladGenerator>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::InvalidParameter("generator bank is empty".into()));
        };
        for g in &generators[1..] {
            if g.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    got: g.dim(),
                });
            }
            if !g.channel.same_as(&first.channel) {
                return Err(Error::InvalidParameter(
                    "all generators must share the measurement channel".into(),
                ));
            }
        }
        Ok(Self { generators })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }

    pub fn channel(&self) -> &MeasurementChannel {
        &self.generators[0].channel
    }

    pub fn generators(&self) -> &[LindbladGenerator] {
        &self.generators
    }

    pub fn get(&self, k: usize) -> &LindbladGenerator {
        &self.generators[k]
    }

    /// `Σ_j γ_j L_j` as a single generator: `H = Σ γ_j H_j`, dissipation ops
    /// `√γ_j L_{j,i}`, shared channel.
    pub fn convex_combination(&self, gamma: &[f64]) -> Result<LindbladGenerator> {
        if gamma.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: gamma.len(),
            });
        }
        let sum: f64 = gamma.iter().sum();
        if gamma.iter().any(|&g| g < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("weights {gamma:?} are not convex")));
        }
        let n = self.dim();
        let mut h = zeros(n);
        let mut ops = Vec::new();
        for (g, &w) in self.generators.iter().zip(gamma) {
            if w == 0.0 {
                continue;
            }
            h += g.h.scale(w);
            ops.extend(g.l_ops.iter().map(|l| l.scale(w.sqrt())));
        }
        LindbladGenerator::new(h, ops, self.channel().clone())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub invariant: bool,
    /// `Σ_j ‖L_{j,Q}‖`
    pub l_q: f64,
    pub c_q: f64,
    /// `‖iH_P − ½(Σ_j L_{j,S}* L_{j,P} + C_S* C_P)‖`
    pub h_p_residual: f64,
}

impl InvarianceReport {
    pub fn max_residual(&self) -> f64 {
        self.l_q.max(self.c_q).max(self.h_p_residual)
    }
}

/// Block conditions for invariance of `H_S`: every `L_Q` and `C_Q` vanish and
/// `iH_P − ½(Σ L_S*L_P + C_S*C_P) = 0`.
pub fn check_invariance(g: &LindbladGenerator, d: &SubspaceDecomposition, tol: f64) -> Result<InvarianceReport> {
    let hb = d.block_decompose(&g.h)?;
    let cb = d.block_decompose(&g.channel.c)?;
    let mut cond = hb.p.map(|z| z * c64(0.0, 1.0)) - (cb.s.adjoint() * &cb.p).scale(0.5);
    let mut l_q = 0.0;
    for l in &g.l_ops {
        let lb = d.block_decompose(l)?;
        l_q += lb.q.norm();
        cond -= (lb.s.adjoint() * &lb.p).scale(0.5);
    }
    let c_q = cb.q.norm();
    let h_p_residual = cond.norm();
    let invariant = l_q <= tol && c_q <= tol && h_p_residual <= tol;
    Ok(InvarianceReport {
        invariant,
        l_q,
        c_q,
        h_p_residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    /// `min{−Re λ : λ ∈ sp(L_R)}`
    pub alpha: f64,
    pub gas: bool,
    pub invariant: bool,
    #[serde(skip)]
    pub eigenvalues: Vec<C64>,
}

/// Eigenvalues of a real square matrix. The double-shift QR iteration can
/// stall on the highly structured superoperator matrices; on failure it is
/// retried on orthogonally similar matrices with seeded random rotations.
fn real_eigenvalues_robust(m: &RMat) -> Result<DVector<C64>> {
    if let Some(s) = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 10_000) {
        return Ok(s.complex_eigenvalues());
    }
    let n = m.nrows();
    let mut rng = crate::sampling::rng_from_seed(0x5eed);
    for _ in 0..8 {
        let g = RMat::from_fn(n, n, |_, _| rand::Rng::sample(&mut rng, rand_distr::StandardNormal));
        let q = g.qr().q();
        let rotated = q.transpose() * m * &q;
        if let Some(s) = nalgebra::linalg::Schur::try_new(rotated, f64::EPSILON, 10_000) {
            return Ok(s.complex_eigenvalues());
        }
    }
    Err(Error::Eigen("Schur decomposition did not converge".into()))
}

/// Spectral abscissa of a real superoperator matrix and its eigenvalues.
pub fn abscissa_of(m: &RMat) -> Result<(f64, Vec<C64>)> {
    let eig = real_eigenvalues_robust(m)?;
    if eig.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigen("non-finite eigenvalue".into()));
    }
    let alpha = eig.iter().map(|z| -z.re).fold(f64::INFINITY, f64::min);
    Ok((alpha, eig.iter().copied().collect()))
}

/// Spectral abscissa of `L_R` for one generator (or a convex combination
/// built with [`GeneratorBank::convex_combination`]).
pub fn spectral_abscissa(g: &LindbladGenerator, d: &SubspaceDecomposition) -> Result<SpectrumReport> {
    let invariant = check_invariance(g, d, TOL_GAS)?.invariant;
    let basis = HermitianBasis::gell_mann(d.dim_r());
    let m = g.restricted(d)?.matrix(&basis)?;
    let (alpha, eigenvalues) = abscissa_of(&m)?;
    Ok(SpectrumReport {
        alpha,
        gas: invariant && alpha > TOL_GAS,
        invariant,
        eigenvalues,
    })
}

/// `e^{tL}` on the full space, represented in a Hermitian basis.
#[derive(Clone, Debug)]
pub struct Propagator {
    basis: HermitianBasis,
    exp: RMat,
}

impl Propagator {
    pub fn new(g: &LindbladGenerator, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("propagation time {t} < 0")));
        }
        let basis = HermitianBasis::gell_mann(g.dim());
        let m = g.superoperator(&basis)?;
        Ok(Self::from_matrix(basis, &m, t))
    }

    pub(crate) fn from_matrix(basis: HermitianBasis, generator: &RMat, t: f64) -> Self {
        let exp = expm(&generator.scale(t));
        Self { basis, exp }
    }

    pub fn apply(&self, rho: &CMat) -> Result<CMat> {
        let v: DVector<f64> = self.basis.vectorize(rho)?;
        self.basis.devectorize(&(&self.exp * v))
    }

    pub fn matrix(&self) -> &RMat {
        &self.exp
    }
}

/// Average (master-equation) state `e^{tL} ρ0`.
pub fn propagate_average(g: &LindbladGenerator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    ensure_dim(rho0.matrix(), g.dim())?;
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let out = Propagator::new(g, t)?.apply(rho0.matrix())?;
    DensityMatrix::new(crate::operator::hermitize(&out))
}

/// Convenience: Pauli matrices.
pub mod pauli {
    use super::*;

    pub fn x() -> CMat {
        CMat::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)])
    }

    pub fn y() -> CMat {
        CMat::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)])
    }

    pub fn z() -> CMat {
        CMat::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)])
    }

    pub fn id() -> CMat {
        identity(2)
    }
}
