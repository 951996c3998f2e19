//! Dense Hermitian linear algebra: eigendecomposition, spectral matrix
//! functions, subspaces and linear relations.
//!
//! Everything here is immutable after construction. Tolerances are fixed
//! constants so that results are reproducible across runs.

mod io;
mod relation;
mod subspace;
mod svd;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use io::{read_matrix_csv, write_matrix_csv};
pub use relation::{rel_adjoint, rel_compose, rel_is_selfadjoint, LinearRelation};
pub use subspace::{subspace_algebra, Subspace, SubspaceOp};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative asymmetry accepted by [`HermitianMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Relative gap below which eigenvalues are treated as one cluster.
pub const CLUSTER_TOL: f64 = 1e-10;
/// Relative singular-value cutoff for every rank decision.
pub const RANK_TOL: f64 = 1e-10;
/// Eigenvalues at or below this are rejected for fractional powers.
pub const POSITIVITY_EPS: f64 = 1e-8;

const EIGH_MAX_ITER: usize = 10_000;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Largest absolute entry, the `‖·‖_max` norm.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `⟨x, y⟩ = Σ x_i conj(y_i)`, linear in the first slot.
pub fn inner(x: &CVector, y: &CVector) -> C64 {
    y.dotc(x)
}

/// A Hermitian matrix. Entries are stored exactly symmetrized.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: CMatrix,
}

impl HermitianMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = max_abs(&entries).max(f64::MIN_POSITIVE);
        let asymmetry = max_abs(&(&entries - entries.adjoint()));
        let threshold = HERMITIAN_TOL * scale;
        if asymmetry > threshold {
            return Err(Error::NotHermitian {
                asymmetry,
                threshold,
            });
        }
        let entries = (&entries + entries.adjoint()).scale(0.5);
        Ok(Self { entries })
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(c))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().copied().map(c));
        Self {
            entries: CMatrix::from_diagonal(&d),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn max_norm(&self) -> f64 {
        max_abs(&self.entries)
    }

    /// `H + shift·I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut entries = self.entries.clone();
        for i in 0..self.dim() {
            entries[(i, i)] += c(shift);
        }
        Self { entries }
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        &self.entries * x
    }
}

/// Eigenvalues ascending, eigenvectors as the matching columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `‖U*U − I‖_max`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.dim();
        let g = self.eigenvectors.adjoint() * &self.eigenvectors;
        max_abs(&(g - CMatrix::identity(n, n)))
    }

    /// `‖AU − U·diag(λ)‖_max`.
    pub fn eigen_residual(&self, h: &HermitianMatrix) -> f64 {
        let av = h.entries() * &self.eigenvectors;
        let vl = self.eigenvectors.clone() * self.diag();
        max_abs(&(av - vl))
    }

    /// `‖U·diag(λ)·U* − H‖_max`.
    pub fn reconstruction_residual(&self, h: &HermitianMatrix) -> f64 {
        max_abs(&(self.apply_function(|l| l) - h.entries()))
    }

    fn diag(&self) -> CMatrix {
        let d = DVector::from_iterator(self.dim(), self.eigenvalues.iter().copied().map(c));
        CMatrix::from_diagonal(&d)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |a, l| a.max(l.abs()))
    }

    /// `U·diag(f(λ))·U*`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let fl = f(l);
            scaled.column_mut(j).scale_mut(fl);
        }
        scaled * u.adjoint()
    }

    /// Groups eigenvalues into clusters `(representative, multiplicity)`.
    ///
    /// Consecutive eigenvalues closer than `CLUSTER_TOL·max(1, ρ)` share a
    /// cluster, where ρ is the spectral radius.
    pub fn multiplicities(&self) -> Vec<(f64, usize)> {
        cluster(&self.eigenvalues, CLUSTER_TOL * self.spectral_radius().max(1.0))
            .into_iter()
            .map(|r| {
                let vals = &self.eigenvalues[r.clone()];
                (vals.iter().sum::<f64>() / vals.len() as f64, vals.len())
            })
            .collect()
    }
}

fn cluster(sorted: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > gap {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Modified Gram-Schmidt on a block of columns, in place.
fn orthonormalize_columns(m: &mut CMatrix, cols: std::ops::Range<usize>) {
    for j in cols.clone() {
        for i in cols.start..j {
            let proj = m.column(i).dotc(&m.column(j));
            let ci = m.column(i).clone_owned();
            m.column_mut(j).axpy(-proj, &ci, c(1.0));
        }
        let norm = m.column(j).norm();
        if norm > 0.0 {
            m.column_mut(j).unscale_mut(norm);
        }
    }
}

pub fn eigh(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = h.dim();
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: CMatrix::zeros(0, 0),
        });
    }
    let eig = nalgebra::SymmetricEigen::try_new(h.entries().clone(), 1e-15, EIGH_MAX_ITER)
        .ok_or(Error::NoConvergence { dim: n })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        eigenvectors.set_column(j, &eig.eigenvectors.column(i));
    }
    let radius = eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    for range in cluster(&eigenvalues, CLUSTER_TOL * radius.max(1.0)) {
        if range.len() > 1 {
            orthonormalize_columns(&mut eigenvectors, range);
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn is_nonnegative_integer(r: f64) -> bool {
    r >= 0.0 && r.fract() == 0.0
}

/// `H^r = U·diag(λ^r)·U*`.
///
/// Nonnegative integer powers accept any spectrum; every other power
/// requires all eigenvalues above [`POSITIVITY_EPS`].
pub fn mat_power(h: &HermitianMatrix, r: f64) -> Result<HermitianMatrix> {
    if !r.is_finite() {
        return Err(Error::Parameter(format!("power must be finite, got {r}")));
    }
    if r == 0.0 {
        return Ok(HermitianMatrix::identity(h.dim()));
    }
    if r == 1.0 {
        return Ok(h.clone());
    }
    mat_power_decomposed(&eigh(h)?, r)
}

/// [`mat_power`] reusing an existing decomposition.
pub fn mat_power_decomposed(d: &SpectralDecomposition, r: f64) -> Result<HermitianMatrix> {
    if r == 0.0 {
        return Ok(HermitianMatrix::identity(d.dim()));
    }
    let entries = if is_nonnegative_integer(r) {
        let k = r as i32;
        d.apply_function(|l| l.powi(k))
    } else {
        if let Some(&l) = d.eigenvalues.iter().find(|&&l| l <= POSITIVITY_EPS) {
            return Err(Error::NotStrictlyPositive {
                eigenvalue: l,
                threshold: POSITIVITY_EPS,
                power: r,
            });
        }
        d.apply_function(|l| l.powf(r))
    };
    // U·D·U* is Hermitian up to rounding; symmetrize rather than re-check.
    let entries = (&entries + entries.adjoint()).scale(0.5);
    Ok(HermitianMatrix { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn real(rows: usize, data: &[f64]) -> HermitianMatrix {
        HermitianMatrix::from_real(&DMatrix::from_row_slice(rows, rows, data)).unwrap()
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let d = eigh(&HermitianMatrix::from_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 2.0, 3.0]);
        // columns are permuted unit vectors
        for (j, row) in [1usize, 2, 0].iter().enumerate() {
            assert_abs_diff_eq!(d.eigenvectors[(*row, j)].norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn two_by_two_matches_characteristic_polynomial() {
        // det([[2-l,1],[1,2-l]]) = (2-l)^2 - 1 -> l = 1, 3
        let h = real(2, &[2.0, 1.0, 1.0, 2.0]);
        let d = eigh(&h).unwrap();
        assert_abs_diff_eq!(d.eigenvalues[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.eigenvalues[1], 3.0, epsilon = 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = d.eigenvectors.column(0);
        let v1 = d.eigenvectors.column(1);
        assert_abs_diff_eq!((v0[0] * v0[1].conj()).re, -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!((v1[0] * v1[1].conj()).re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(v0[0].norm(), s, epsilon = 1e-14);
        assert!(d.eigen_residual(&h) < 1e-14);
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let d = eigh(&HermitianMatrix::identity(5)).unwrap();
        assert!(d.eigenvalues.iter().all(|&l| l == 1.0));
        assert_eq!(d.multiplicities(), vec![(1.0, 5)]);
        assert!(d.orthonormality_residual() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian_with_asymmetry() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]).map(c);
        match HermitianMatrix::new(m) {
            Err(Error::NotHermitian { asymmetry, .. }) => assert_eq!(asymmetry, 2.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_non_finite() {
        let m = DMatrix::from_row_slice(1, 1, &[f64::NAN]).map(c);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NonFinite)));
    }

    #[test]
    fn complex_hermitian_eigensolve() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(2.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), c(2.0)],
        );
        let h = HermitianMatrix::new(m).unwrap();
        let d = eigh(&h).unwrap();
        assert_abs_diff_eq!(d.eigenvalues[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.eigenvalues[1], 3.0, epsilon = 1e-14);
        assert!(d.reconstruction_residual(&h) < 1e-14);
    }

    #[test]
    fn square_root_of_diagonal() {
        let p = mat_power(&HermitianMatrix::from_diagonal(&[1.0, 4.0]), 0.5).unwrap();
        assert_abs_diff_eq!(p.entries()[(0, 0)].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.entries()[(1, 1)].re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.entries()[(0, 1)].norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn square_root_two_by_two() {
        // U diag(1, sqrt 3) U* with U = [(1,-1), (1,1)]/sqrt 2
        let h = real(2, &[2.0, 1.0, 1.0, 2.0]);
        let p = mat_power(&h, 0.5).unwrap();
        let s3 = 3f64.sqrt();
        assert_abs_diff_eq!(p.entries()[(0, 0)].re, (1.0 + s3) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.entries()[(0, 1)].re, (s3 - 1.0) / 2.0, epsilon = 1e-14);
        let sq = p.entries() * p.entries();
        assert!(max_abs(&(sq - h.entries())) < 1e-14);
    }

    #[test]
    fn power_zero_and_one() {
        let h = real(2, &[-3.0, 1.0, 1.0, 2.0]);
        assert_eq!(mat_power(&h, 0.0).unwrap(), HermitianMatrix::identity(2));
        assert_eq!(mat_power(&h, 1.0).unwrap(), h);
        // integer powers tolerate negative spectrum
        let sq = mat_power(&h, 2.0).unwrap();
        assert!(max_abs(&(sq.entries() - h.entries() * h.entries())) < 1e-12);
    }

    #[test]
    fn fractional_power_names_bad_eigenvalue() {
        let h = HermitianMatrix::from_diagonal(&[0.0, 1.0]);
        match mat_power(&h, 0.5) {
            Err(Error::NotStrictlyPositive { eigenvalue, .. }) => assert_eq!(eigenvalue, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_cluster_is_orthonormal() {
        let h = HermitianMatrix::from_diagonal(&[2.0, 5.0, 2.0]);
        let d = eigh(&h).unwrap();
        assert_eq!(d.multiplicities(), vec![(2.0, 2), (5.0, 1)]);
        assert!(d.orthonormality_residual() < 1e-14);
    }
}
