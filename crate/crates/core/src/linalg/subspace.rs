use super::svd::jacobi_svd;
use super::{c, max_abs, CMatrix, CVector, RANK_TOL};
use crate::error::{Error, Result};

/// Tolerance for subspace membership and equality tests.
pub const SUBSPACE_TOL: f64 = 1e-10;

/// A subspace of `C^ambient`, held as an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: usize,
    basis: CMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceOp {
    Sum,
    Intersect,
    Orthocomplement,
}

/// Orthonormal basis of the column space of `m`. Singular values at or
/// below `RANK_TOL·max(σ_max, floor)` count as zero.
pub(crate) fn column_space(m: &CMatrix, floor: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if cols == 0 || rows == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let j = jacobi_svd(m);
    let cut = RANK_TOL * j.sigma.iter().copied().fold(floor, f64::max);
    let mut keep: Vec<usize> = (0..cols).filter(|&i| j.sigma[i] > cut && j.sigma[i] > 0.0).collect();
    keep.sort_by(|&a, &b| j.sigma[b].total_cmp(&j.sigma[a]));
    CMatrix::from_fn(rows, keep.len(), |i, k| j.w[(i, keep[k])] / c(j.sigma[keep[k]]))
}

/// Orthonormal basis of `{x : m·x = 0}`, same cutoff as [`column_space`].
pub(crate) fn null_space(m: &CMatrix, floor: f64) -> CMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    let j = jacobi_svd(m);
    let cut = RANK_TOL * j.sigma.iter().copied().fold(floor, f64::max);
    let null: Vec<usize> = (0..cols).filter(|&i| j.sigma[i] <= cut).collect();
    CMatrix::from_fn(cols, null.len(), |i, k| j.v[(i, null[k])])
}

impl Subspace {
    /// Span of the columns of `vectors`.
    pub fn span(vectors: &CMatrix) -> Self {
        Self::span_with_floor(vectors, 0.0)
    }

    /// Span with the rank cutoff measured against at least `floor`, for
    /// blocks cut out of orthonormal bases where noise must not count.
    pub(crate) fn span_with_floor(vectors: &CMatrix, floor: f64) -> Self {
        Self {
            ambient: vectors.nrows(),
            basis: column_space(vectors, floor),
        }
    }

    pub fn from_vectors(ambient: usize, vectors: &[CVector]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(Error::Dimension {
                expected: ambient,
                found: v.len(),
            });
        }
        let m = CMatrix::from_fn(ambient, vectors.len(), |i, j| vectors[j][i]);
        Ok(Self::span(&m))
    }

    /// Kernel of `m` as a subspace of `C^{m.ncols()}`.
    pub fn kernel_of(m: &CMatrix) -> Self {
        Self {
            ambient: m.ncols(),
            basis: null_space(m, 0.0),
        }
    }

    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: CMatrix::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            basis: CMatrix::identity(ambient, ambient),
        }
    }

    /// Span of the standard unit vectors with the given indices.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        let m = CMatrix::from_fn(ambient, indices.len(), |i, j| {
            if indices[j] == i {
                c(1.0)
            } else {
                c(0.0)
            }
        });
        Self::span(&m)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// `‖B*B − I‖_max`.
    pub fn orthonormality_residual(&self) -> f64 {
        let k = self.dim();
        max_abs(&(self.basis.adjoint() * &self.basis - CMatrix::identity(k, k)))
    }

    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    pub fn project(&self, x: &CVector) -> CVector {
        &self.basis * (self.basis.adjoint() * x)
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::Dimension {
                expected: self.ambient,
                found: other.ambient,
            });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut m = CMatrix::zeros(self.ambient, self.dim() + other.dim());
        m.view_mut((0, 0), (self.ambient, self.dim()))
            .copy_from(&self.basis);
        m.view_mut((0, self.dim()), (self.ambient, other.dim()))
            .copy_from(&other.basis);
        Ok(Subspace::span_with_floor(&m, 1.0))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let (a, b) = (self.dim(), other.dim());
        if a == 0 || b == 0 {
            return Ok(Subspace::zero(self.ambient));
        }
        // x = Qa·u = Qb·v  <=>  [Qa, -Qb]·(u, v) = 0
        let mut m = CMatrix::zeros(self.ambient, a + b);
        m.view_mut((0, 0), (self.ambient, a)).copy_from(&self.basis);
        m.view_mut((0, a), (self.ambient, b))
            .copy_from(&(-&other.basis));
        let k = null_space(&m, 1.0);
        let u = k.rows(0, a).clone_owned();
        Ok(Subspace::span_with_floor(&(&self.basis * u), 1.0))
    }

    pub fn orthocomplement(&self) -> Subspace {
        if self.dim() == 0 {
            return Subspace::full(self.ambient);
        }
        Subspace {
            ambient: self.ambient,
            basis: null_space(&self.basis.adjoint(), 1.0),
        }
    }

    /// Distance of `x` from the subspace relative to `max(1, ‖x‖)`.
    pub fn distance(&self, x: &CVector) -> f64 {
        (x - self.project(x)).norm() / x.norm().max(1.0)
    }

    pub fn contains(&self, x: &CVector) -> bool {
        self.distance(x) <= SUBSPACE_TOL
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        if self.ambient != other.ambient || other.dim() > self.dim() {
            return false;
        }
        let resid = &other.basis - self.projector() * &other.basis;
        max_abs(&resid) <= SUBSPACE_TOL
    }

    pub fn approx_eq(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.contains_subspace(other)
    }

    /// Image of the subspace under `m` (not necessarily injective).
    pub fn image(&self, m: &CMatrix) -> Subspace {
        Subspace::span(&(m * &self.basis))
    }
}

/// Sum, intersection, or orthogonal complement of subspaces.
pub fn subspace_algebra(op: SubspaceOp, a: &Subspace, b: Option<&Subspace>) -> Result<Subspace> {
    match op {
        SubspaceOp::Orthocomplement => Ok(a.orthocomplement()),
        SubspaceOp::Sum | SubspaceOp::Intersect => {
            let b = b.ok_or_else(|| {
                Error::Parameter(format!("{op:?} needs a second subspace"))
            })?;
            if op == SubspaceOp::Sum {
                a.sum(b)
            } else {
                a.intersect(b)
            }
        }
    }
}
