//! Seeded sampling. Every random quantity in the crate is drawn from
//! ChaCha8 seeded with a `u64`, so trials replicate bit-for-bit.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, CMatrix, CVector, HermitianMatrix, Subspace, C64};

pub type Lab = ChaCha8Rng;

pub fn seeded(seed: u64) -> Lab {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives a per-trial seed so trials are independent of evaluation order.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ trial.wrapping_add(1).wrapping_mul(0xBF58_476D_1CE4_E5B9)
}

pub fn complex_normal(rng: &mut Lab) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn complex_vector(rng: &mut Lab, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| complex_normal(rng))
}

pub fn real_vector(rng: &mut Lab, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| c(rng.sample(StandardNormal)))
}

pub fn complex_matrix(rng: &mut Lab, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Unitary factor of the QR decomposition of a complex Gaussian matrix.
pub fn unitary(rng: &mut Lab, n: usize) -> CMatrix {
    complex_matrix(rng, n, n).qr().q()
}

/// `U·diag(λ)·U*` with λ drawn uniformly from `[lo, hi]`.
pub fn positive_definite(rng: &mut Lab, n: usize, lo: f64, hi: f64) -> HermitianMatrix {
    let lambdas: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
    with_spectrum(rng, &lambdas)
}

/// A random unitary rotation of `diag(λ)`.
pub fn with_spectrum(rng: &mut Lab, lambdas: &[f64]) -> HermitianMatrix {
    let n = lambdas.len();
    let u = unitary(rng, n);
    let d = CMatrix::from_diagonal(&CVector::from_iterator(n, lambdas.iter().copied().map(c)));
    let m = &u * d * u.adjoint();
    HermitianMatrix::new((&m + m.adjoint()).scale(0.5)).expect("rotation of a real diagonal")
}

/// Span of `d` Gaussian vectors in `C^n`.
pub fn subspace(rng: &mut Lab, n: usize, d: usize) -> Subspace {
    Subspace::span(&complex_matrix(rng, n, d))
}

pub fn real_matrix(rng: &mut Lab, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let a = complex_vector(&mut seeded(7), 5);
        let b = complex_vector(&mut seeded(7), 5);
        assert_eq!(a, b);
        assert_ne!(trial_seed(7, 0), trial_seed(7, 1));
    }

    #[test]
    fn unitary_is_unitary() {
        let u = unitary(&mut seeded(1), 6);
        let g = u.adjoint() * &u;
        assert!(crate::linalg::max_abs(&(g - CMatrix::identity(6, 6))) < 1e-13);
    }
}
