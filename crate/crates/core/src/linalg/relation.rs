use super::subspace::null_space;
use super::{CMatrix, CVector, HermitianMatrix, Subspace};
use crate::error::{Error, Result};

/// A linear relation in `C^n`: a subspace of `C^n ⊕ C^n`.
///
/// Graph vectors are stacked as `(f, g)` with `f` in the first `n` rows.
#[derive(Debug, Clone)]
pub struct LinearRelation {
    n: usize,
    graph: Subspace,
}

fn stack(top: &CMatrix, bottom: &CMatrix) -> CMatrix {
    let (n, k) = top.shape();
    debug_assert_eq!(bottom.shape(), (n, k));
    let mut m = CMatrix::zeros(2 * n, k);
    m.view_mut((0, 0), (n, k)).copy_from(top);
    m.view_mut((n, 0), (n, k)).copy_from(bottom);
    m
}

impl LinearRelation {
    pub fn from_graph(graph: Subspace) -> Result<Self> {
        let a = graph.ambient_dim();
        if !a.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "graph ambient dimension {a} is odd"
            )));
        }
        Ok(Self { n: a / 2, graph })
    }

    /// Span of the pairs `(f_j, g_j)` given as matching columns.
    pub fn from_pairs(f: &CMatrix, g: &CMatrix) -> Result<Self> {
        if f.shape() != g.shape() {
            return Err(Error::Dimension {
                expected: f.ncols(),
                found: g.ncols(),
            });
        }
        Ok(Self {
            n: f.nrows(),
            graph: Subspace::span(&stack(f, g)),
        })
    }

    /// Graph of a square matrix.
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        let id = CMatrix::identity(n, n);
        Self {
            n,
            graph: Subspace::span(&stack(&id, m)),
        }
    }

    pub fn from_hermitian(h: &HermitianMatrix) -> Self {
        Self::from_matrix(h.entries())
    }

    /// `{(f, Mf) : f ∈ dom}`.
    pub fn restricted(m: &CMatrix, dom: &Subspace) -> Self {
        let q = dom.basis();
        Self {
            n: m.nrows(),
            graph: Subspace::span(&stack(q, &(m * q))),
        }
    }

    /// `{0} × C^n`.
    pub fn purely_multivalued(n: usize) -> Self {
        Self::from_parts(&Subspace::zero(n), &Subspace::full(n))
    }

    /// `dom × {0} + {0} × mul`, the relation with zero operator part.
    pub fn from_parts(dom: &Subspace, mul: &Subspace) -> Self {
        let n = dom.ambient_dim();
        let (a, b) = (dom.dim(), mul.dim());
        let mut m = CMatrix::zeros(2 * n, a + b);
        m.view_mut((0, 0), (n, a)).copy_from(dom.basis());
        m.view_mut((n, a), (n, b)).copy_from(mul.basis());
        Self {
            n,
            graph: Subspace::span(&m),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn graph(&self) -> &Subspace {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.graph.dim()
    }

    /// First and second components of the graph basis.
    pub fn components(&self) -> (CMatrix, CMatrix) {
        let b = self.graph.basis();
        let k = b.ncols();
        (
            b.view((0, 0), (self.n, k)).clone_owned(),
            b.view((self.n, 0), (self.n, k)).clone_owned(),
        )
    }

    pub fn contains_pair(&self, f: &CVector, g: &CVector) -> bool {
        let mut v = CVector::zeros(2 * self.n);
        v.rows_mut(0, self.n).copy_from(f);
        v.rows_mut(self.n, self.n).copy_from(g);
        self.graph.contains(&v)
    }

    pub fn domain(&self) -> Subspace {
        Subspace::span_with_floor(&self.components().0, 1.0)
    }

    pub fn range(&self) -> Subspace {
        Subspace::span_with_floor(&self.components().1, 1.0)
    }

    /// `{g : (0, g) ∈ T}`.
    pub fn multivalued_part(&self) -> Subspace {
        let (f, g) = self.components();
        Subspace::span_with_floor(&(g * null_space(&f, 1.0)), 1.0)
    }

    /// `{f : (f, 0) ∈ T}`.
    pub fn kernel(&self) -> Subspace {
        let (f, g) = self.components();
        Subspace::span_with_floor(&(f * null_space(&g, 1.0)), 1.0)
    }

    pub fn is_operator(&self) -> bool {
        self.multivalued_part().dim() == 0
    }

    /// The operator part `f ↦ P g`, with `P` the projection onto
    /// `(mul T)^⊥`, extended by zero off the domain.
    pub fn operator_part(&self) -> CMatrix {
        let (f, g) = self.components();
        let p = self.multivalued_part().orthocomplement().projector();
        let eps = super::RANK_TOL * f.norm().max(1.0);
        let fplus = super::svd::pseudo_inverse(&f, eps);
        p * g * fplus
    }

    /// Eigenvalues of the operator part compressed to its domain.
    ///
    /// Meaningful for self-adjoint relations, where the compression is
    /// Hermitian and the domain is `(mul T)^⊥`.
    pub fn operator_spectrum(&self) -> Result<Vec<f64>> {
        let q = self.domain();
        let op = self.operator_part();
        let compressed = q.basis().adjoint() * op * q.basis();
        // The operator part is recovered through a pseudo-inverse, so its
        // asymmetry sits above matrix round-off; symmetrize after a looser test.
        let asymmetry = super::max_abs(&(&compressed - compressed.adjoint()));
        let threshold = 1e-8 * super::max_abs(&compressed).max(1.0);
        if asymmetry > threshold {
            return Err(Error::NotHermitian { asymmetry, threshold });
        }
        let h = HermitianMatrix::new((&compressed + compressed.adjoint()).scale(0.5))?;
        Ok(super::eigh(&h)?.eigenvalues)
    }

    /// `J(T)` with `J(f, g) = (g, −f)`.
    fn flipped(&self) -> CMatrix {
        let (f, g) = self.components();
        stack(&g, &(-f))
    }

    pub fn adjoint(&self) -> LinearRelation {
        let flipped = Subspace::span(&self.flipped());
        LinearRelation {
            n: self.n,
            graph: flipped.orthocomplement(),
        }
    }

    /// `self ∘ inner = {(f, h) : ∃g, (f, g) ∈ inner, (g, h) ∈ self}`.
    pub fn compose(&self, inner: &LinearRelation) -> Result<LinearRelation> {
        if self.n != inner.n {
            return Err(Error::Dimension {
                expected: inner.n,
                found: self.n,
            });
        }
        let n = self.n;
        let (sf, sg) = inner.components();
        let (tf, th) = self.components();
        let (a, b) = (sf.ncols(), tf.ncols());
        if a == 0 || b == 0 {
            return Ok(LinearRelation {
                n,
                graph: Subspace::zero(2 * n),
            });
        }
        // Sg·x = Tf·y
        let mut m = CMatrix::zeros(n, a + b);
        m.view_mut((0, 0), (n, a)).copy_from(&sg);
        m.view_mut((0, a), (n, b)).copy_from(&(-&tf));
        let k = null_space(&m, 1.0);
        let x = k.rows(0, a).clone_owned();
        let y = k.rows(a, b).clone_owned();
        Ok(LinearRelation {
            n,
            graph: Subspace::span_with_floor(&stack(&(sf * x), &(th * y)), 1.0),
        })
    }

    /// `T^k` by repeated composition; `T^0` is the identity.
    pub fn power(&self, k: u32) -> Result<LinearRelation> {
        let mut acc = LinearRelation::from_matrix(&CMatrix::identity(self.n, self.n));
        for _ in 0..k {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    pub fn sum(&self, other: &LinearRelation) -> Result<LinearRelation> {
        Ok(LinearRelation {
            n: self.n,
            graph: self.graph.sum(&other.graph)?,
        })
    }

    pub fn intersect(&self, other: &LinearRelation) -> Result<LinearRelation> {
        Ok(LinearRelation {
            n: self.n,
            graph: self.graph.intersect(&other.graph)?,
        })
    }

    pub fn approx_eq(&self, other: &LinearRelation) -> bool {
        self.n == other.n && self.graph.approx_eq(&other.graph)
    }

    pub fn is_subset_of(&self, other: &LinearRelation) -> bool {
        other.graph.contains_subspace(&self.graph)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_subset_of(&self.adjoint())
    }

    pub fn is_selfadjoint(&self) -> bool {
        self.approx_eq(&self.adjoint())
    }

    /// `{(f, z·f)}`, the graph of `z·I`.
    pub fn scalar(n: usize, z: super::C64) -> LinearRelation {
        LinearRelation::from_matrix(&(CMatrix::identity(n, n) * z))
    }

    /// Hermitian part of `⟨g, f⟩` on the graph basis, i.e. the form
    /// `⟨Tf, f⟩` written in graph coordinates.
    pub fn form_matrix(&self) -> CMatrix {
        let (f, g) = self.components();
        let m = f.adjoint() * g;
        (&m + m.adjoint()).scale(0.5)
    }
}

pub fn rel_adjoint(t: &LinearRelation) -> LinearRelation {
    t.adjoint()
}

pub fn rel_compose(t: &LinearRelation, s: &LinearRelation) -> Result<LinearRelation> {
    t.compose(s)
}

pub fn rel_is_selfadjoint(t: &LinearRelation) -> bool {
    t.is_selfadjoint()
}
