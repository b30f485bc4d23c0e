//! Seeded random operators and states used by sampled checks and tests.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operator::{c64, CMat, C64};

pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im)
}

/// Square complex Ginibre matrix with i.i.d. standard complex normal entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| complex_normal(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let g = ginibre(rng, n);
    (&g + g.adjoint()).scale(0.5)
}

/// Hilbert-Schmidt distributed density matrix `G G* / Tr(G G*)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let g = ginibre(rng, n);
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho.unscale(tr)
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let v = DVector::from_fn(n, |_, _| complex_normal(rng));
    let v = v.unscale(v.norm());
    &v * v.adjoint()
}

/// Density matrix diagonal in the working basis, with uniformly random
/// probabilities (flat Dirichlet).
pub fn random_diagonal_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let mut p: Vec<f64> = (0..n)
        .map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln())
        .collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    CMat::from_diagonal(&DVector::from_iterator(n, p.into_iter().map(|x| c64(x, 0.0))))
}
