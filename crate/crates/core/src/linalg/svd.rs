//! One-sided Jacobi SVD for complex matrices.
//!
//! nalgebra's bidiagonal complex SVD loses accuracy on rank-deficient
//! inputs (recomposition errors near 1e-4 on graph blocks), which breaks
//! subspace identification, so subspace code routes through this instead.

use super::{CMatrix, C64};

const MAX_SWEEPS: usize = 80;
const ORTHO_EPS: f64 = 1e-15;

/// `A·V = W` with `V` unitary and the columns of `W` mutually orthogonal;
/// the singular values are the column norms of `W`.
pub(crate) struct Jacobi {
    pub w: CMatrix,
    pub v: CMatrix,
    pub sigma: Vec<f64>,
}

pub(crate) fn jacobi_svd(a: &CMatrix) -> Jacobi {
    let n = a.ncols();
    let mut w = a.clone();
    let mut v = CMatrix::identity(n, n);
    // columns this small are zero to working precision; rotating them only
    // accumulates subnormal rounding in V
    let negligible = (1e-3 * f64::EPSILON * a.norm()).powi(2);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g <= ORTHO_EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // rotate the phase out of column q, then a real rotation
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, phase, c, s);
                rotate(&mut v, p, q, phase, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma = (0..n).map(|j| w.column(j).norm()).collect();
    Jacobi { w, v, sigma }
}

fn rotate(m: &mut CMatrix, p: usize, q: usize, phase: C64, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let x = m[(i, p)];
        let y = m[(i, q)] * phase;
        m[(i, p)] = x * c - y * s;
        m[(i, q)] = x * s + y * c;
    }
}

/// Moore-Penrose pseudo-inverse, singular values at or below `eps` dropped.
pub(crate) fn pseudo_inverse(a: &CMatrix, eps: f64) -> CMatrix {
    let j = jacobi_svd(a);
    let mut out = CMatrix::zeros(a.ncols(), a.nrows());
    for (k, &s) in j.sigma.iter().enumerate() {
        if s > eps {
            out += j.v.column(k) * j.w.column(k).adjoint() / C64::new(s * s, 0.0);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::rng;

    #[test]
    fn recomposes_rank_deficient() {
        let mut g = rng::seeded(9);
        let l = rng::complex_matrix(&mut g, 12, 3);
        let r = rng::complex_matrix(&mut g, 3, 7);
        let a = &l * &r;
        let j = jacobi_svd(&a);
        assert!(max_abs(&(&a * &j.v - &j.w)) < 1e-12);
        assert!(max_abs(&(j.v.adjoint() * &j.v - CMatrix::identity(7, 7))) < 1e-13);
        let big = j.sigma.iter().filter(|&&s| s > 1e-10).count();
        assert_eq!(big, 3);
        let p = pseudo_inverse(&a, 1e-10);
        assert!(max_abs(&(&a * &p * &a - &a)) < 1e-10);
    }

    #[test]
    fn wide_matrix() {
        let mut g = rng::seeded(2);
        let a = rng::complex_matrix(&mut g, 2, 5);
        let j = jacobi_svd(&a);
        assert_eq!(j.sigma.iter().filter(|&&s| s > 1e-12).count(), 2);
        assert!(max_abs(&(&a * &j.v - &j.w)) < 1e-13);
        assert!(max_abs(&(j.v.adjoint() * &j.v - CMatrix::identity(5, 5))) < 1e-13);
    }

    #[test]
    fn orthonormal_rows_keep_v_unitary() {
        let mut g = rng::seeded(1);
        let s = crate::linalg::Subspace::span(&rng::complex_matrix(&mut g, 10, 4));
        let j = jacobi_svd(&s.basis().adjoint());
        assert!(max_abs(&(j.v.adjoint() * &j.v - CMatrix::identity(10, 10))) < 1e-13);
        assert_eq!(j.sigma.iter().filter(|&&x| x > 0.5).count(), 4);
    }
}
