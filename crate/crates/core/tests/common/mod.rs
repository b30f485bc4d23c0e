//! Random models shared by the property tests.
#![allow(dead_code)]

use nalgebra::DVector;
use qswitch_core::certificate::{build_certificate, ConvexWeights, LyapunovCertificate};
use qswitch_core::lindblad::{GeneratorBank, LindbladGenerator, MeasurementChannel};
use qswitch_core::operator::{c64, hermitian_eigenvalues, Blocks, CMat, SubspaceDecomposition, C64};
use qswitch_core::sampling::{ginibre, random_density, random_hermitian, rng_from_seed};
use rand::Rng;

pub fn rect<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> CMat {
    let g = ginibre(rng, rows.max(cols));
    g.view((0, 0), (rows, cols)).into_owned().scale(scale)
}

/// Target subspace of dimension `dim_s` spanned by the first columns of a Haar-ish unitary.
pub fn random_decomposition<R: Rng + ?Sized>(rng: &mut R, n: usize, dim_s: usize) -> SubspaceDecomposition {
    let q = ginibre(rng, n).qr().q();
    let vecs: Vec<DVector<C64>> = (0..dim_s).map(|j| q.column(j).into_owned()).collect();
    SubspaceDecomposition::from_target_vectors(&vecs).unwrap()
}

/// Generator satisfying the block conditions for invariance of `H_S`:
/// `L_Q = C_Q = 0` and `H_P = −(i/2)(L_S*L_P + C_S*C_P)`.
pub fn invariant_generator<R: Rng + ?Sized>(
    rng: &mut R,
    d: &SubspaceDecomposition,
    c: &CMat,
    eta: f64,
    scale: f64,
) -> LindbladGenerator {
    let (ds, dr) = (d.dim_s(), d.dim_r());
    let l = d
        .reassemble(&Blocks {
            s: rect(rng, ds, ds, scale),
            p: rect(rng, ds, dr, scale),
            q: CMat::zeros(dr, ds),
            r: rect(rng, dr, dr, scale),
        })
        .unwrap();
    let lb = d.block_decompose(&l).unwrap();
    let cb = d.block_decompose(c).unwrap();
    let h_p = (lb.s.adjoint() * &lb.p + cb.s.adjoint() * &cb.p).map(|z| z * c64(0.0, -0.5));
    let h = d
        .reassemble(&Blocks {
            s: random_hermitian(rng, ds).scale(scale),
            q: h_p.adjoint(),
            p: h_p,
            r: random_hermitian(rng, dr).scale(scale),
        })
        .unwrap();
    LindbladGenerator::new(h, vec![l], MeasurementChannel::new(c.clone(), eta).unwrap()).unwrap()
}

/// Measurement operator with vanishing `Q` block.
pub fn invariant_measurement<R: Rng + ?Sized>(rng: &mut R, d: &SubspaceDecomposition, scale: f64) -> CMat {
    let (ds, dr) = (d.dim_s(), d.dim_r());
    d.reassemble(&Blocks {
        s: rect(rng, ds, ds, scale),
        p: rect(rng, ds, dr, scale),
        q: CMat::zeros(dr, ds),
        r: rect(rng, dr, dr, scale),
    })
    .unwrap()
}

pub fn invariant_bank<R: Rng + ?Sized>(
    rng: &mut R,
    d: &SubspaceDecomposition,
    m: usize,
    eta: f64,
    scale: f64,
) -> GeneratorBank {
    let c = invariant_measurement(rng, d, scale);
    GeneratorBank::new((0..m).map(|_| invariant_generator(rng, d, &c, eta, scale)).collect()).unwrap()
}

/// Unconstrained generator with `n_l` dissipation operators.
pub fn random_generator<R: Rng + ?Sized>(rng: &mut R, n: usize, n_l: usize, eta: f64, scale: f64) -> LindbladGenerator {
    let h = random_hermitian(rng, n).scale(scale);
    let l_ops = (0..n_l).map(|_| ginibre(rng, n).scale(scale)).collect();
    let c = ginibre(rng, n).scale(scale);
    LindbladGenerator::new(h, l_ops, MeasurementChannel::new(c, eta).unwrap()).unwrap()
}

/// Density matrix supported on `H_S`.
pub fn target_state<R: Rng + ?Sized>(rng: &mut R, d: &SubspaceDecomposition) -> CMat {
    let p = d.projector_s();
    let sigma = p * random_density(rng, d.dim()) * p;
    let tr = sigma.trace().re;
    sigma.unscale(tr)
}

/// Full-rank state mixed with the maximally mixed state.
pub fn interior_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    random_density(rng, n).scale(0.5) + CMat::identity(n, n).scale(0.5 / n as f64)
}

pub fn min_eig(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).min()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

pub struct Model {
    pub bank: GeneratorBank,
    pub d: SubspaceDecomposition,
    pub cert: LyapunovCertificate,
}

/// Random invariant bank of `m` generators with a certificate for uniform weights.
pub fn certified_model(seed: u64, n: usize, ds: usize, m: usize) -> Option<Model> {
    let mut rng = rng_from_seed(seed);
    let d = random_decomposition(&mut rng, n, ds);
    let bank = invariant_bank(&mut rng, &d, m, 0.8, 1.0);
    let cert = build_certificate(&bank, &d, &ConvexWeights::uniform(m), &Default::default()).ok()?;
    Some(Model { bank, d, cert })
}
