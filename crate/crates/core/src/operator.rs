//! Dense operator algebra on a finite-dimensional Hilbert space: density
//! matrices, the S/R block decomposition of a target subspace, Hermitian
//! (generalized Gell-Mann) bases and real superoperator matrices.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

pub const TOL_HERM: f64 = 1e-9;
pub const TOL_TRACE: f64 = 1e-9;
pub const TOL_PSD: f64 = 1e-9;
pub const TOL_ROUNDTRIP: f64 = 1e-12;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Builds a complex matrix from row-major real parts.
pub fn from_real_rows(rows: &[&[f64]]) -> CMat {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMat::from_fn(n, m, |i, j| c64(rows[i][j], 0.0))
}

pub fn ket_bra(n: usize, i: usize, j: usize) -> CMat {
    let mut m = zeros(n);
    m[(i, j)] = c64(1.0, 0.0);
    m
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

/// Frobenius norm of `m - m*`.
pub fn hermiticity_error(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (m[(i, j)] - m[(j, i)].conj()).norm_sqr();
        }
    }
    acc.sqrt()
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace_re(m: &CMat) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

/// `Re Tr(A B)` without forming the product.
pub fn trace_product_re(a: &CMat, b: &CMat) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = a[(i, j)];
            let y = b[(j, i)];
            acc += x.re * y.re - x.im * y.im;
        }
    }
    acc
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted ascending.
pub fn hermitian_eigen(m: &CMat) -> (DVector<f64>, CMat) {
    let n = m.nrows();
    let eig = nalgebra::SymmetricEigen::try_new(hermitize(m), f64::EPSILON, 100_000)
        .expect("Hermitian eigensolver did not converge");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = zeros(n);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMat) -> DVector<f64> {
    hermitian_eigen(m).0
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).min()
}

pub fn max_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).max()
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    let d = CMat::from_diagonal(&vals.map(|x| c64(f(x), 0.0)));
    &vecs * d * vecs.adjoint()
}

/// Trace norm (sum of singular values).
pub fn trace_norm(m: &CMat) -> f64 {
    if hermiticity_error(m) <= 1e-12 * (1.0 + m.norm()) {
        hermitian_eigenvalues(m).iter().map(|x| x.abs()).sum()
    } else {
        m.clone()
            .try_svd(false, false, f64::EPSILON, 100_000)
            .expect("SVD did not converge")
            .singular_values
            .sum()
    }
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &CMat, sigma: &CMat) -> f64 {
    0.5 * trace_norm(&(rho - sigma))
}

fn check_square(m: &CMat, n: usize) -> Result<()> {
    if m.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.nrows(),
        });
    }
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.ncols(),
        });
    }
    Ok(())
}

pub(crate) fn ensure_dim(m: &CMat, n: usize) -> Result<()> {
    check_square(m, n)
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMat);

impl DensityMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        let n = m.nrows();
        check_square(&m, n)?;
        if n < 2 {
            return Err(Error::InvalidState(format!("dimension {n} < 2")));
        }
        let herm = hermiticity_error(&m);
        if herm > TOL_HERM {
            return Err(Error::InvalidState(format!("not Hermitian (error {herm:.3e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = min_eigenvalue(&m);
        if min < -TOL_PSD {
            return Err(Error::InvalidState(format!("min eigenvalue {min:.3e} < 0")));
        }
        Ok(Self(m))
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn from_vector(psi: &DVector<C64>) -> Result<Self> {
        let nrm = psi.norm();
        if nrm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = psi.unscale(nrm);
        Self::new(&v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }
}

impl AsRef<CMat> for DensityMatrix {
    fn as_ref(&self) -> &CMat {
        &self.0
    }
}

/// The four blocks of an operator in a basis adapted to `H_S ⊕ H_R`.
#[derive(Clone, Debug, PartialEq)]
pub struct Blocks {
    pub s: CMat,
    pub p: CMat,
    pub q: CMat,
    pub r: CMat,
}

/// Target subspace `H_S` with its complement `H_R` and an adapted unitary basis.
#[derive(Clone, Debug)]
pub struct SubspaceDecomposition {
    projector_s: CMat,
    projector_r: CMat,
    /// Columns `0..dim_s` span `H_S`, the remaining columns span `H_R`.
    basis: CMat,
    dim_s: usize,
}

impl SubspaceDecomposition {
    /// Builds the decomposition from an orthogonal projector onto `H_S`.
    ///
    /// The adapted basis is obtained by Gram-Schmidt on the projected
    /// working-basis vectors `Π e_1, Π e_2, …` (and likewise for `Π_R`), which
    /// makes it independent of eigensolver phase and ordering choices.
    pub fn from_projector(projector: &CMat) -> Result<Self> {
        let n = projector.nrows();
        check_square(projector, n)?;
        if n < 2 {
            return Err(Error::InvalidOperator(format!("dimension {n} < 2")));
        }
        let scale = 1.0 + projector.norm();
        if hermiticity_error(projector) > TOL_HERM * scale {
            return Err(Error::InvalidOperator("projector is not Hermitian".into()));
        }
        if (projector * projector - projector).norm() > TOL_HERM * scale {
            return Err(Error::InvalidOperator("projector is not idempotent".into()));
        }
        let rank = trace_re(projector).round() as usize;
        if rank == 0 || rank == n {
            return Err(Error::InvalidOperator("projector must differ from 0 and I".into()));
        }
        let complement = identity(n) - projector;
        let s_vecs = projected_basis(projector, rank)?;
        let r_vecs = projected_basis(&complement, n - rank)?;
        let mut basis = zeros(n);
        for (k, v) in s_vecs.iter().chain(r_vecs.iter()).enumerate() {
            basis.set_column(k, v);
        }
        Self::from_adapted_basis(basis, rank)
    }

    /// Builds the decomposition from an orthonormal list of vectors spanning `H_S`.
    pub fn from_target_vectors(vectors: &[DVector<C64>]) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::InvalidOperator("empty target basis".into()));
        };
        let n = first.len();
        let mut proj = zeros(n);
        for v in vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
            proj += v * v.adjoint();
        }
        let dec = Self::from_projector(&proj)?;
        if dec.dim_s != vectors.len() {
            return Err(Error::InvalidOperator("target vectors are not orthonormal".into()));
        }
        Ok(dec)
    }

    /// Uses `basis` (unitary, columns `0..dim_s` spanning `H_S`) as given.
    pub fn from_adapted_basis(basis: CMat, dim_s: usize) -> Result<Self> {
        let n = basis.nrows();
        check_square(&basis, n)?;
        if dim_s == 0 || dim_s >= n {
            return Err(Error::InvalidOperator(format!(
                "dim_s = {dim_s} out of range for N = {n}"
            )));
        }
        if (basis.adjoint() * &basis - identity(n)).norm() > 1e-10 {
            return Err(Error::InvalidOperator("adapted basis is not unitary".into()));
        }
        let us = basis.columns(0, dim_s);
        let ur = basis.columns(dim_s, n - dim_s);
        let projector_s = us * us.adjoint();
        let projector_r = ur * ur.adjoint();
        Ok(Self {
            projector_s,
            projector_r,
            basis,
            dim_s,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_r(&self) -> usize {
        self.dim() - self.dim_s
    }

    pub fn projector_s(&self) -> &CMat {
        &self.projector_s
    }

    pub fn projector_r(&self) -> &CMat {
        &self.projector_r
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn block_decompose(&self, x: &CMat) -> Result<Blocks> {
        check_square(x, self.dim())?;
        let (n, ds) = (self.dim(), self.dim_s);
        let y = self.basis.adjoint() * x * &self.basis;
        Ok(Blocks {
            s: y.view((0, 0), (ds, ds)).into_owned(),
            p: y.view((0, ds), (ds, n - ds)).into_owned(),
            q: y.view((ds, 0), (n - ds, ds)).into_owned(),
            r: y.view((ds, ds), (n - ds, n - ds)).into_owned(),
        })
    }

    pub fn reassemble(&self, blocks: &Blocks) -> Result<CMat> {
        let (n, ds) = (self.dim(), self.dim_s);
        let dr = n - ds;
        let shapes = [
            (&blocks.s, ds, ds),
            (&blocks.p, ds, dr),
            (&blocks.q, dr, ds),
            (&blocks.r, dr, dr),
        ];
        for (m, r, c) in shapes {
            if m.nrows() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    got: m.nrows(),
                });
            }
            if m.ncols() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    got: m.ncols(),
                });
            }
        }
        let mut y = zeros(n);
        y.view_mut((0, 0), (ds, ds)).copy_from(&blocks.s);
        y.view_mut((0, ds), (ds, dr)).copy_from(&blocks.p);
        y.view_mut((ds, 0), (dr, ds)).copy_from(&blocks.q);
        y.view_mut((ds, ds), (dr, dr)).copy_from(&blocks.r);
        Ok(&self.basis * y * self.basis.adjoint())
    }

    /// R block only: `U_R* X U_R`.
    pub fn r_block(&self, x: &CMat) -> Result<CMat> {
        check_square(x, self.dim())?;
        let ur = self.basis.columns(self.dim_s, self.dim_r());
        Ok(ur.adjoint() * x * ur)
    }

    /// Extension of an R-block operator by zeros to the full space.
    pub fn extend_r(&self, x_r: &CMat) -> Result<CMat> {
        check_square(x_r, self.dim_r())?;
        let ur = self.basis.columns(self.dim_s, self.dim_r());
        Ok(ur * x_r * ur.adjoint())
    }

    /// `‖ρ − Π_S ρ Π_S‖₁`.
    pub fn subspace_distance(&self, rho: &CMat) -> f64 {
        let d = rho - &self.projector_s * rho * &self.projector_s;
        trace_norm(&d)
    }

    /// `Tr(Π_R ρ)`.
    pub fn population_r(&self, rho: &CMat) -> f64 {
        trace_product_re(&self.projector_r, rho)
    }
}

fn projected_basis(projector: &CMat, rank: usize) -> Result<Vec<DVector<C64>>> {
    let n = projector.nrows();
    let mut out: Vec<DVector<C64>> = Vec::with_capacity(rank);
    for i in 0..n {
        if out.len() == rank {
            break;
        }
        let mut v: DVector<C64> = projector.column(i).into_owned();
        for u in &out {
            let overlap = u.dotc(&v);
            v -= u * overlap;
        }
        // second pass for numerical orthogonality
        for u in &out {
            let overlap = u.dotc(&v);
            v -= u * overlap;
        }
        let nrm = v.norm();
        if nrm > 1e-8 {
            out.push(v.unscale(nrm));
        }
    }
    if out.len() != rank {
        return Err(Error::InvalidOperator(format!(
            "could not build {rank} adapted basis vectors"
        )));
    }
    Ok(out)
}

/// Hilbert-Schmidt orthonormal basis of Hermitian `n×n` matrices:
/// `I/√n`, then the normalized generalized Gell-Mann matrices
/// (symmetric pairs, antisymmetric pairs, diagonals).
#[derive(Clone, Debug)]
pub struct HermitianBasis {
    n: usize,
    elements: Vec<CMat>,
}

impl HermitianBasis {
    pub fn gell_mann(n: usize) -> Self {
        assert!(n >= 1, "basis dimension must be positive");
        let mut elements = Vec::with_capacity(n * n);
        elements.push(identity(n).unscale((n as f64).sqrt()));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for j in 0..n {
            for k in (j + 1)..n {
                let mut m = zeros(n);
                m[(j, k)] = c64(h, 0.0);
                m[(k, j)] = c64(h, 0.0);
                elements.push(m);
            }
        }
        for j in 0..n {
            for k in (j + 1)..n {
                let mut m = zeros(n);
                m[(j, k)] = c64(0.0, -h);
                m[(k, j)] = c64(0.0, h);
                elements.push(m);
            }
        }
        for l in 1..n {
            let norm = ((l * (l + 1)) as f64).sqrt();
            let mut m = zeros(n);
            for j in 0..l {
                m[(j, j)] = c64(1.0 / norm, 0.0);
            }
            m[(l, l)] = c64(-(l as f64) / norm, 0.0);
            elements.push(m);
        }
        Self { n, elements }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMat] {
        &self.elements
    }

    /// Coordinates `v_j = Tr(Φ_j X)` of a Hermitian matrix.
    pub fn vectorize(&self, x: &CMat) -> Result<DVector<f64>> {
        check_square(x, self.n)?;
        let herm = hermiticity_error(x);
        if herm > TOL_HERM * (1.0 + x.norm()) {
            return Err(Error::InvalidOperator(format!("not Hermitian (error {herm:.3e})")));
        }
        Ok(self.vectorize_unchecked(x))
    }

    pub(crate) fn vectorize_unchecked(&self, x: &CMat) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.elements.iter().map(|phi| trace_product_re(phi, x)))
    }

    pub fn devectorize(&self, v: &DVector<f64>) -> Result<CMat> {
        if v.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: v.len(),
            });
        }
        let mut out = zeros(self.n);
        for (phi, &c) in self.elements.iter().zip(v.iter()) {
            if c != 0.0 {
                out += phi.scale(c);
            }
        }
        Ok(out)
    }

    /// Real matrix `M[i][j] = Tr(Φ_i f(Φ_j))` of a Hermitian-preserving map.
    pub fn superoperator_matrix(&self, f: impl Fn(&CMat) -> CMat) -> Result<RMat> {
        let d = self.len();
        let mut m = RMat::zeros(d, d);
        for (j, phi_j) in self.elements.iter().enumerate() {
            let img = f(phi_j);
            check_square(&img, self.n)?;
            let herm = hermiticity_error(&img);
            if herm > TOL_HERM * (1.0 + img.norm()) {
                return Err(Error::InvalidOperator(format!(
                    "map is not Hermitian-preserving on basis element {j} (error {herm:.3e})"
                )));
            }
            for (i, phi_i) in self.elements.iter().enumerate() {
                m[(i, j)] = trace_product_re(phi_i, &img);
            }
        }
        Ok(m)
    }
}

/// Serde adapter for complex matrices as nested `[[re, im], ...]` row arrays.
pub mod serde_cmat {
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    use super::{c64, CMat};

    pub fn to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMat, String> {
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err("ragged matrix rows".into());
        }
        Ok(CMat::from_fn(n, cols, |i, j| c64(rows[i][j][0], rows[i][j][1])))
    }

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_rows(&rows).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_density, random_hermitian, rng_from_seed};

    fn diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| c64(x, 0.0))))
    }

    fn first_two(n: usize) -> SubspaceDecomposition {
        SubspaceDecomposition::from_projector(&(ket_bra(n, 0, 0) + ket_bra(n, 1, 1))).unwrap()
    }

    #[test]
    fn block_decompose_diagonal() {
        let d = first_two(4);
        let b = d.block_decompose(&diag(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        assert_eq!(b.s, diag(&[1.0, 2.0]));
        assert_eq!(b.r, diag(&[3.0, 4.0]));
        assert!(b.p.norm() == 0.0 && b.q.norm() == 0.0);
    }

    #[test]
    fn block_decompose_identity() {
        let d = first_two(4);
        let b = d.block_decompose(&identity(4)).unwrap();
        assert_eq!(b.s, identity(2));
        assert_eq!(b.r, identity(2));
        assert_eq!(b.p, zeros(2));
    }

    #[test]
    fn block_round_trip_random() {
        let mut rng = rng_from_seed(1);
        let d = first_two(4);
        let x = random_hermitian(&mut rng, 4);
        let back = d.reassemble(&d.block_decompose(&x).unwrap()).unwrap();
        assert!((back - x).norm() <= TOL_ROUNDTRIP);
    }

    #[test]
    fn block_dimension_mismatch() {
        let d = first_two(4);
        assert!(matches!(
            d.block_decompose(&identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(d.extend_r(&identity(3)).is_err());
    }

    #[test]
    fn extend_r_examples() {
        let d = first_two(4);
        assert_eq!(d.extend_r(&zeros(2)).unwrap(), zeros(4));
        assert!((d.extend_r(&identity(2)).unwrap() - d.projector_r()).norm() < 1e-15);
        let k = d.extend_r(&diag(&[1.0, 2.0])).unwrap();
        assert!((k - diag(&[0.0, 0.0, 1.0, 2.0])).norm() < 1e-15);
        let b = d.block_decompose(&d.extend_r(&diag(&[1.0, 2.0])).unwrap()).unwrap();
        assert_eq!(b.s, zeros(2));
        assert_eq!(b.p, zeros(2));
        assert_eq!(b.r, diag(&[1.0, 2.0]));
    }

    #[test]
    fn projector_adapted_basis_is_canonical_for_diagonal() {
        let d = first_two(4);
        assert!((d.basis() - identity(4)).norm() < 1e-15);
        assert_eq!(d.dim_s(), 2);
        assert_eq!(d.dim_r(), 2);
    }

    #[test]
    fn rejects_bad_projectors() {
        assert!(SubspaceDecomposition::from_projector(&identity(3)).is_err());
        assert!(SubspaceDecomposition::from_projector(&zeros(3)).is_err());
        assert!(SubspaceDecomposition::from_projector(&diag(&[0.5, 1.0])).is_err());
    }

    #[test]
    fn subspace_distance_examples() {
        let d = first_two(4);
        let inside = DensityMatrix::new(diag(&[0.3, 0.7, 0.0, 0.0])).unwrap();
        assert!(d.subspace_distance(inside.matrix()) < 1e-15);
        let outside = d.projector_r().unscale(2.0);
        assert!((d.subspace_distance(&outside) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gell_mann_is_orthonormal() {
        for n in 1..=5 {
            let b = HermitianBasis::gell_mann(n);
            assert_eq!(b.len(), n * n);
            for (i, a) in b.elements().iter().enumerate() {
                assert!(hermiticity_error(a) == 0.0);
                if i > 0 {
                    assert!(trace_re(a).abs() < 1e-15);
                }
                for (j, c) in b.elements().iter().enumerate() {
                    let g = (a * c).trace();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g.re - want).abs() < 1e-12 && g.im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn vectorize_examples() {
        let b = HermitianBasis::gell_mann(3);
        for k in 0..b.len() {
            let v = b.vectorize(&b.elements()[k]).unwrap();
            for j in 0..b.len() {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((v[j] - want).abs() < 1e-14);
            }
        }
        assert_eq!(b.vectorize(&zeros(3)).unwrap().norm(), 0.0);
        let mut rng = rng_from_seed(2);
        let x = random_hermitian(&mut rng, 3);
        let back = b.devectorize(&b.vectorize(&x).unwrap()).unwrap();
        assert!((back - x).norm() <= TOL_ROUNDTRIP);
    }

    #[test]
    fn vectorize_rejects_non_hermitian() {
        let b = HermitianBasis::gell_mann(2);
        assert!(b.vectorize(&ket_bra(2, 0, 1)).is_err());
    }

    #[test]
    fn superoperator_identity_and_negation() {
        let b = HermitianBasis::gell_mann(3);
        let m = b.superoperator_matrix(|x| x.clone()).unwrap();
        assert!((m - RMat::identity(9, 9)).norm() < 1e-14);
        let m = b.superoperator_matrix(|x| -x).unwrap();
        assert!((m + RMat::identity(9, 9)).norm() < 1e-14);
    }

    #[test]
    fn superoperator_rejects_non_hermitian_map() {
        let b = HermitianBasis::gell_mann(2);
        let a = ket_bra(2, 0, 1);
        assert!(b.superoperator_matrix(|x| &a * x).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(diag(&[0.5, 0.5])).is_ok());
        assert!(DensityMatrix::new(diag(&[0.6, 0.6])).is_err());
        assert!(DensityMatrix::new(diag(&[1.5, -0.5])).is_err());
        assert!(DensityMatrix::new(ket_bra(2, 0, 1) + diag(&[0.5, 0.5])).is_err());
        let mut rng = rng_from_seed(3);
        let rho = random_density(&mut rng, 4);
        assert!(DensityMatrix::new(rho).is_ok());
    }

    #[test]
    fn trace_norm_matches_singular_values() {
        let mut rng = rng_from_seed(4);
        let x = random_hermitian(&mut rng, 5);
        let svd: f64 = x.singular_values().sum();
        assert!((trace_norm(&x) - svd).abs() < 1e-10);
    }
}
