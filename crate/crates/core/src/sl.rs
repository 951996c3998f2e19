//! Finite-difference Sturm-Liouville operators
//! `ℓ[f] = −(1/w)((p f′)′ + q f)` on `L²((a,b), w)`, their Wronskian
//! boundary forms, principal solutions and boundary functionals.
//!
//! Grids are uniform with step `h`. At an endpoint with a Dirichlet
//! condition the first node sits at distance `h` (the endpoint itself is a
//! ghost node with value zero); at a natural (zero-flux) endpoint it sits
//! at `h/2` and the boundary face carries no flux.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{c, CVector, HermitianMatrix};
use crate::report::{num, Table};

type CoefFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-declared endpoint classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointType {
    Regular,
    LimitCircle,
    LimitPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Left,
    Right,
}

/// Discrete boundary condition at an endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Dirichlet,
    /// Zero flux `p f′ = 0`; the Neumann-type base.
    Natural,
}

#[derive(Clone)]
pub struct SLCoefficients {
    p: CoefFn,
    q: CoefFn,
    w: CoefFn,
    pub a: f64,
    pub b: f64,
    pub left: EndpointType,
    pub right: EndpointType,
    /// Set when limit-circle endpoints were pulled inward.
    pub truncated: bool,
    pub name: String,
}

impl fmt::Debug for SLCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SLCoefficients")
            .field("name", &self.name)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("left", &self.left)
            .field("right", &self.right)
            .field("truncated", &self.truncated)
            .finish()
    }
}

impl SLCoefficients {
    pub fn new(
        name: impl Into<String>,
        (a, b): (f64, f64),
        p: impl Fn(f64) -> f64 + Send + Sync + 'static,
        q: impl Fn(f64) -> f64 + Send + Sync + 'static,
        w: impl Fn(f64) -> f64 + Send + Sync + 'static,
        (left, right): (EndpointType, EndpointType),
    ) -> Result<Self> {
        if !(a < b && a.is_finite() && b.is_finite()) {
            return Err(Error::Parameter(format!("interval must satisfy a < b and be finite, got ({a}, {b})")));
        }
        Ok(Self {
            p: Arc::new(p),
            q: Arc::new(q),
            w: Arc::new(w),
            a,
            b,
            left,
            right,
            truncated: false,
            name: name.into(),
        })
    }

    /// `p = w = 1`, `q = 0`, both endpoints regular.
    pub fn flat(a: f64, b: f64) -> Result<Self> {
        Self::new(
            "flat",
            (a, b),
            |_| 1.0,
            |_| 0.0,
            |_| 1.0,
            (EndpointType::Regular, EndpointType::Regular),
        )
    }

    /// Jacobi expression on `(−1, 1)`: `p = (1−x)^{α+1}(1+x)^{β+1}`,
    /// `w = (1−x)^α (1+x)^β`, `q = 0`; eigenvalues `m(m+α+β+1)`.
    pub fn jacobi(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) {
            return Err(Error::Parameter(format!(
                "Jacobi parameters must exceed -1, got alpha = {alpha}, beta = {beta}"
            )));
        }
        let kind = |e: f64| if e >= 1.0 { EndpointType::LimitPoint } else { EndpointType::LimitCircle };
        Self::new(
            format!("jacobi({alpha},{beta})"),
            (-1.0, 1.0),
            move |x| (1.0 - x).powf(alpha + 1.0) * (1.0 + x).powf(beta + 1.0),
            |_| 0.0,
            move |x| (1.0 - x).powf(alpha) * (1.0 + x).powf(beta),
            (kind(beta), kind(alpha)),
        )
    }

    /// Laguerre expression `p = x^{α+1}e^{−x}`, `w = x^α e^{−x}`, `q = 0`
    /// on `(0, length)`; eigenvalues `m` on the full half-line.
    pub fn laguerre(alpha: f64, length: f64) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(Error::Parameter(format!("alpha must satisfy alpha > -1, got {alpha}")));
        }
        let left = if alpha >= 1.0 { EndpointType::LimitPoint } else { EndpointType::LimitCircle };
        Self::new(
            format!("laguerre({alpha})"),
            (0.0, length),
            move |x| x.powf(alpha + 1.0) * (-x).exp(),
            |_| 0.0,
            move |x| x.powf(alpha) * (-x).exp(),
            (left, EndpointType::LimitPoint),
        )
    }

    /// Piecewise-linear interpolation of samples `(x, p, q, w)`.
    pub fn tabulated(samples: &[[f64; 4]]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Parameter("tabulated coefficients need at least two samples".into()));
        }
        if samples.windows(2).any(|s| s[1][0] <= s[0][0]) {
            return Err(Error::Parameter("tabulated x values must increase strictly".into()));
        }
        let table: Arc<Vec<[f64; 4]>> = Arc::new(samples.to_vec());
        let column = |j: usize| {
            let t = Arc::clone(&table);
            move |x: f64| interpolate(&t, j, x)
        };
        let (a, b) = (samples[0][0], samples[samples.len() - 1][0]);
        Self::new(
            "tabulated",
            (a, b),
            column(1),
            column(2),
            column(3),
            (EndpointType::Regular, EndpointType::Regular),
        )
    }

    pub fn p(&self, x: f64) -> f64 {
        (self.p)(x)
    }

    pub fn q(&self, x: f64) -> f64 {
        (self.q)(x)
    }

    pub fn w(&self, x: f64) -> f64 {
        (self.w)(x)
    }

    /// Same expression with `q` replaced by `q + shift`.
    pub fn with_q_shift(mut self, shift: f64) -> Self {
        let q = Arc::clone(&self.q);
        self.q = Arc::new(move |x| q(x) + shift);
        self
    }

    /// Pulls every limit-circle endpoint inward by `delta`, treating it as
    /// regular afterwards, and marks the result as truncated.
    pub fn truncate_limit_circle(mut self, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && 2.0 * delta < self.b - self.a) {
            return Err(Error::Parameter(format!("truncation delta {delta} does not fit the interval")));
        }
        if self.left == EndpointType::LimitCircle {
            self.a += delta;
            self.left = EndpointType::Regular;
            self.truncated = true;
        }
        if self.right == EndpointType::LimitCircle {
            self.b -= delta;
            self.right = EndpointType::Regular;
            self.truncated = true;
        }
        Ok(self)
    }

    fn endpoint_type(&self, end: Endpoint) -> EndpointType {
        match end {
            Endpoint::Left => self.left,
            Endpoint::Right => self.right,
        }
    }

    /// Dirichlet at regular and limit-circle endpoints, natural at
    /// limit-point endpoints.
    pub fn default_conditions(&self) -> (BoundaryCondition, BoundaryCondition) {
        let pick = |t| match t {
            EndpointType::LimitPoint => BoundaryCondition::Natural,
            _ => BoundaryCondition::Dirichlet,
        };
        (pick(self.left), pick(self.right))
    }
}

fn interpolate(t: &[[f64; 4]], j: usize, x: f64) -> f64 {
    let i = t.partition_point(|s| s[0] <= x).clamp(1, t.len() - 1);
    let (l, r) = (&t[i - 1], &t[i]);
    let s = (x - l[0]) / (r[0] - l[0]);
    l[j] + s * (r[j] - l[j])
}

/// `L_h = W^{−1/2} T W^{−1/2}` on `N` nodes, with `T` the flux stencil of
/// `−((p f′)′ + q f)` and `W = diag(w(x_i))`.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub nodes: Vec<f64>,
    pub h: f64,
    pub weights: Vec<f64>,
    pub conditions: (BoundaryCondition, BoundaryCondition),
    stencil: DMatrix<f64>,
    symmetric: DMatrix<f64>,
}

fn offset(bc: BoundaryCondition) -> f64 {
    match bc {
        BoundaryCondition::Dirichlet => 1.0,
        BoundaryCondition::Natural => 0.5,
    }
}

/// Discretization with the conditions chosen from the endpoint types.
pub fn discretize(coeffs: &SLCoefficients, n: usize) -> Result<DiscreteOperator> {
    build(coeffs, n, coeffs.default_conditions())
}

/// Discretization with the same condition at both ends: Dirichlet for the
/// Friedrichs-like base, natural for the transversal base.
pub fn build_a0(coeffs: &SLCoefficients, n: usize, bc: BoundaryCondition) -> Result<DiscreteOperator> {
    build(coeffs, n, (bc, bc))
}

pub fn build(coeffs: &SLCoefficients, n: usize, conditions: (BoundaryCondition, BoundaryCondition)) -> Result<DiscreteOperator> {
    if n < 3 {
        return Err(Error::Parameter(format!("need at least 3 nodes, got {n}")));
    }
    let (sa, sb) = (offset(conditions.0), offset(conditions.1));
    let h = (coeffs.b - coeffs.a) / (n as f64 - 1.0 + sa + sb);
    let nodes: Vec<f64> = (0..n).map(|i| coeffs.a + (i as f64 + sa) * h).collect();

    // Face i sits between node i−1 and node i; faces 0 and n are boundary faces.
    let mut faces = vec![0.0; n + 1];
    for (i, face) in faces.iter_mut().enumerate() {
        let boundary = match i {
            0 => Some(conditions.0),
            _ if i == n => Some(conditions.1),
            _ => None,
        };
        if boundary == Some(BoundaryCondition::Natural) {
            continue;
        }
        let x = coeffs.a + (i as f64 + sa - 0.5) * h;
        let p = coeffs.p(x);
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Parameter(format!("p must be positive, got p({x}) = {p}")));
        }
        *face = p;
    }
    let mut weights = Vec::with_capacity(n);
    for &x in &nodes {
        let w = coeffs.w(x);
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::Parameter(format!("w must be positive, got w({x}) = {w}")));
        }
        weights.push(w);
    }

    let h2 = h * h;
    let mut t = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        t[(i, i)] = (faces[i] + faces[i + 1]) / h2 - coeffs.q(nodes[i]);
        if i + 1 < n {
            t[(i, i + 1)] = -faces[i + 1] / h2;
            t[(i + 1, i)] = -faces[i + 1] / h2;
        }
    }
    let isw: Vec<f64> = weights.iter().map(|w| 1.0 / w.sqrt()).collect();
    let symmetric = DMatrix::from_fn(n, n, |i, j| isw[i] * t[(i, j)] * isw[j]);
    Ok(DiscreteOperator {
        nodes,
        h,
        weights,
        conditions,
        stencil: t,
        symmetric,
    })
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    /// The stencil matrix `T`.
    pub fn stencil(&self) -> &DMatrix<f64> {
        &self.stencil
    }

    /// `L_h` as a Hermitian matrix for the operator-theoretic modules.
    pub fn matrix(&self) -> HermitianMatrix {
        HermitianMatrix::from_real(&self.symmetric).expect("symmetric by construction")
    }

    /// Ascending eigenvalues of `L_h`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.symmetric.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Eigenpairs with eigenvectors mapped back to grid functions by
    /// `W^{−1/2}`, ascending.
    pub fn eigenpairs(&self) -> Vec<(f64, Vec<f64>)> {
        let eig = SymmetricEigen::new(self.symmetric.clone());
        let mut pairs: Vec<(f64, Vec<f64>)> = (0..self.dim())
            .map(|j| {
                let v = eig.eigenvectors.column(j);
                let f = (0..self.dim()).map(|i| v[i] / self.weights[i].sqrt()).collect();
                (eig.eigenvalues[j], f)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    }

    /// `ℓ_h f = W^{−1} T f`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let tf = &self.stencil * nalgebra::DVector::from_column_slice(f);
        tf.iter().zip(&self.weights).map(|(v, w)| v / w).collect()
    }

    /// `Σ h w_i f_i g_i`.
    pub fn weighted_inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.h * f.iter().zip(g).zip(&self.weights).map(|((a, b), w)| a * b * w).sum::<f64>()
    }

    /// `v = √h W^{1/2} f`, so that `v·u = ⟨f, g⟩_w` and `L_h v` represents `ℓ_h f`.
    pub fn to_matrix_frame(&self, f: &[f64]) -> CVector {
        let sh = self.h.sqrt();
        CVector::from_iterator(f.len(), f.iter().zip(&self.weights).map(|(v, w)| c(sh * w.sqrt() * v)))
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }
}

/// Grid values `(x_i, f(x_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn to_table(&self, name: &str) -> Table {
        let mut t = Table::new(name, &["x", "value"]);
        for (x, v) in self.x.iter().zip(&self.values) {
            t.push(vec![num(*x), num(*v)]);
        }
        t
    }
}

fn check_len(nodes: &[f64], f: &[f64]) -> Result<()> {
    if f.len() != nodes.len() {
        return Err(Error::Dimension {
            expected: nodes.len(),
            found: f.len(),
        });
    }
    Ok(())
}

/// `p(x)(f′g − f g′)` at node `i`: central differences inside, one-sided
/// at the first and last node.
pub fn wronskian_form(coeffs: &SLCoefficients, nodes: &[f64], f: &[f64], g: &[f64], i: usize) -> Result<f64> {
    check_len(nodes, f)?;
    check_len(nodes, g)?;
    let n = nodes.len();
    if i >= n {
        return Err(Error::Parameter(format!("node {i} is outside a grid of {n} nodes")));
    }
    if n < 2 {
        return Err(Error::Parameter("wronskian needs at least two nodes".into()));
    }
    let (l, r) = match i {
        0 => (0, 1),
        _ if i == n - 1 => (n - 2, n - 1),
        _ => (i - 1, i + 1),
    };
    let dx = nodes[r] - nodes[l];
    let df = (f[r] - f[l]) / dx;
    let dg = (g[r] - g[l]) / dx;
    Ok(coeffs.p(nodes[i]) * (df * g[i] - f[i] * dg))
}

/// Relative residuals of Green's and Dirichlet's formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensCheck {
    /// `|⟨ℓf, g⟩_w − ⟨f, ℓg⟩_w|` over `|⟨ℓf, g⟩_w| + 1`.
    pub symmetry: f64,
    /// `|⟨ℓf, g⟩_w − Σ h (p f′g′ − q f g)|` over the absolute size of the
    /// sum, with `f′, g′` central differences at the nodes.
    pub dirichlet: f64,
}

/// Green's formula without boundary terms for `f, g` vanishing on the first
/// and last two nodes.
pub fn greens_dirichlet_check(op: &DiscreteOperator, coeffs: &SLCoefficients, f: &[f64], g: &[f64]) -> Result<GreensCheck> {
    check_len(&op.nodes, f)?;
    check_len(&op.nodes, g)?;
    let n = op.dim();
    let edge = [0, 1, n - 2, n - 1];
    if edge.iter().any(|&i| f[i] != 0.0 || g[i] != 0.0) {
        return Err(Error::Parameter("test functions must vanish on the first and last two nodes".into()));
    }
    let lf = op.apply(f);
    let lg = op.apply(g);
    let left = op.weighted_inner(&lf, g);
    let right = op.weighted_inner(f, &lg);
    let symmetry = (left - right).abs() / (left.abs() + 1.0);

    let h = op.h;
    let mut sum = 0.0;
    let mut scale = 0.0;
    for i in 1..n - 1 {
        let x = op.nodes[i];
        let df = (f[i + 1] - f[i - 1]) / (2.0 * h);
        let dg = (g[i + 1] - g[i - 1]) / (2.0 * h);
        let a = h * coeffs.p(x) * df * dg;
        let b = h * coeffs.q(x) * f[i] * g[i];
        sum += a - b;
        scale += a.abs() + b.abs();
    }
    let dirichlet = (left - sum).abs() / scale.max(f64::MIN_POSITIVE);
    Ok(GreensCheck { symmetry, dirichlet })
}

/// RK4 step for `u′ = v/p`, `v′ = −(q + λw) u`.
fn rk4(coeffs: &SLCoefficients, lambda: f64, x: f64, (u, v): (f64, f64), h: f64) -> (f64, f64) {
    let rhs = |x: f64, u: f64, v: f64| (v / coeffs.p(x), -(coeffs.q(x) + lambda * coeffs.w(x)) * u);
    let (k1u, k1v) = rhs(x, u, v);
    let (k2u, k2v) = rhs(x + h / 2.0, u + h / 2.0 * k1u, v + h / 2.0 * k1v);
    let (k3u, k3v) = rhs(x + h / 2.0, u + h / 2.0 * k2u, v + h / 2.0 * k2v);
    let (k4u, k4v) = rhs(x + h, u + h * k3u, v + h * k3v);
    (
        u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
        v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

/// Solution of `ℓu = λu` with `u = 0`, `p u′ = 1` at a regular endpoint,
/// sampled at `xs` (any order). RK4 steps are at most `max_step` long.
pub fn principal_solution_at(
    coeffs: &SLCoefficients,
    lambda: f64,
    end: Endpoint,
    xs: &[f64],
    max_step: f64,
) -> Result<Vec<f64>> {
    if coeffs.endpoint_type(end) != EndpointType::Regular {
        return Err(Error::Parameter(format!(
            "principal solutions need a regular endpoint, {end:?} is {:?}",
            coeffs.endpoint_type(end)
        )));
    }
    if !(max_step > 0.0) {
        return Err(Error::Parameter(format!("step must be positive, got {max_step}")));
    }
    let start = match end {
        Endpoint::Left => coeffs.a,
        Endpoint::Right => coeffs.b,
    };
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| (xs[i] - start).abs().total_cmp(&(xs[j] - start).abs()));
    let mut out = vec![0.0; xs.len()];
    let mut x = start;
    let mut state = (0.0, 1.0);
    for i in order {
        let target = xs[i];
        if target < coeffs.a || target > coeffs.b {
            return Err(Error::Parameter(format!("sample point {target} is outside the interval")));
        }
        let span = target - x;
        let steps = (span.abs() / max_step).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for _ in 0..steps {
            state = rk4(coeffs, lambda, x, state, h);
            x += h;
        }
        x = target;
        out[i] = state.0;
    }
    Ok(out)
}

/// Principal solution on the uniform grid `a + i(b−a)/steps`, `i = 0..=steps`.
pub fn principal_solution(coeffs: &SLCoefficients, lambda: f64, end: Endpoint, steps: usize) -> Result<GridFunction> {
    if steps == 0 {
        return Err(Error::Parameter("need at least one step".into()));
    }
    let h = (coeffs.b - coeffs.a) / steps as f64;
    let mut x: Vec<f64> = (0..=steps).map(|i| coeffs.a + i as f64 * h).collect();
    x[steps] = coeffs.b;
    let values = principal_solution_at(coeffs, lambda, end, &x, h)?;
    Ok(GridFunction { x, values })
}

/// A grid representer `r` of `f ↦ [f, u](endpoint)`.
#[derive(Debug, Clone)]
pub struct BoundaryFunctional {
    pub end: Endpoint,
    /// `⟨f, r⟩_w = Σ h w_i f_i r_i` approximates `[f, u](x)` at the endpoint.
    pub representer: Vec<f64>,
    /// The generating solution at the grid nodes.
    pub u: Vec<f64>,
}

impl BoundaryFunctional {
    pub fn pair(&self, op: &DiscreteOperator, f: &[f64]) -> f64 {
        op.weighted_inner(f, &self.representer)
    }

    /// The representer in the frame of [`DiscreteOperator::matrix`].
    pub fn matrix_column(&self, op: &DiscreteOperator) -> CVector {
        op.to_matrix_frame(&self.representer)
    }
}

/// Representer of the one-sided discrete Wronskian `[f, u]` at the node
/// nearest the endpoint, where `u` is the principal solution with
/// spectral parameter `lambda`.
pub fn boundary_functional(coeffs: &SLCoefficients, op: &DiscreteOperator, lambda: f64, end: Endpoint) -> Result<BoundaryFunctional> {
    let u = principal_solution_at(coeffs, lambda, end, &op.nodes, op.h / 4.0)?;
    let n = op.dim();
    let (i, j) = match end {
        Endpoint::Left => (0, 1),
        Endpoint::Right => (n - 1, n - 2),
    };
    // [f, u](x_i) = p(x_i) (f′ u_i − f_i u′), f′ = (f_j − f_i)/(x_j − x_i)
    let dx = op.nodes[j] - op.nodes[i];
    let p = coeffs.p(op.nodes[i]);
    let du = (u[j] - u[i]) / dx;
    let mut coef = vec![0.0; n];
    coef[i] = p * (-u[i] / dx - du);
    coef[j] = p * (u[i] / dx);
    let representer = coef
        .iter()
        .zip(&op.weights)
        .map(|(cf, w)| cf / (op.h * w))
        .collect();
    Ok(BoundaryFunctional { end, representer, u })
}

/// Successive ratios `e_k / e_{k+1}`; about 4 for a second-order method
/// when the grid is refined by 2 each time.
pub fn convergence_ratios(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|e| e[0] / e[1]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn flat_dirichlet_closed_form() {
        let co = SLCoefficients::flat(0.0, PI).unwrap();
        let op = discretize(&co, 99).unwrap();
        let h = op.h;
        assert_abs_diff_eq!(h, PI / 100.0, epsilon = 1e-15);
        let ev = op.eigenvalues();
        let exact = 2.0 / (h * h) * (1.0 - h.cos());
        assert_abs_diff_eq!(ev[0], exact, epsilon = 1e-10);
        assert!(ev[0] < 1.0 && 1.0 - ev[0] < 1e-3);
    }

    #[test]
    fn q_shift_moves_spectrum_down() {
        // ℓ carries −q, so q + c shifts every eigenvalue by −c
        let co = SLCoefficients::flat(0.0, 1.0).unwrap();
        let base = discretize(&co, 20).unwrap().eigenvalues();
        let shifted = discretize(&co.with_q_shift(0.75), 20).unwrap().eigenvalues();
        for (a, b) in base.iter().zip(&shifted) {
            assert_abs_diff_eq!(a - 0.75, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn jacobi_zero_mode_and_first_level() {
        let co = SLCoefficients::jacobi(1.0, 1.0).unwrap();
        assert_eq!(co.default_conditions(), (BoundaryCondition::Natural, BoundaryCondition::Natural));
        let op = discretize(&co, 200).unwrap();
        let ev = op.eigenvalues();
        assert!(ev[0].abs() < 1e-9);
        assert!((ev[1] - 4.0).abs() < 1e-2);
    }

    #[test]
    fn second_order_eigenvalues() {
        let flat = SLCoefficients::flat(0.0, PI).unwrap();
        let jac = SLCoefficients::jacobi(1.0, 1.0).unwrap();
        for k in 0..3 {
            let mut ef = Vec::new();
            let mut ej = Vec::new();
            for n in [100, 200, 400] {
                let exact = ((k + 1) * (k + 1)) as f64;
                ef.push((discretize(&flat, n).unwrap().eigenvalues()[k] - exact).abs());
                let m = (k + 1) as f64;
                ej.push((discretize(&jac, n).unwrap().eigenvalues()[k + 1] - m * (m + 3.0)).abs());
            }
            for r in convergence_ratios(&ef).into_iter().chain(convergence_ratios(&ej)) {
                assert!((3.5..4.5).contains(&r), "k = {k}: {r}");
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let co = SLCoefficients::flat(0.0, 1.0).unwrap();
        assert!(discretize(&co, 2).is_err());
        let bad = SLCoefficients::new("neg", (0.0, 1.0), |x| x - 0.5, |_| 0.0, |_| 1.0, (EndpointType::Regular, EndpointType::Regular)).unwrap();
        assert!(discretize(&bad, 10).is_err());
        assert!(SLCoefficients::flat(1.0, 0.0).is_err());
        assert!(SLCoefficients::jacobi(-1.0, 0.0).is_err());
    }

    #[test]
    fn neumann_base_has_zero_mode() {
        let co = SLCoefficients::flat(0.0, PI).unwrap();
        let op = build_a0(&co, 100, BoundaryCondition::Natural).unwrap();
        let ev = op.eigenvalues();
        assert!(ev[0].abs() < 1e-10);
        assert!((ev[1] - 1.0).abs() < 1e-3);
        assert!((ev[2] - 4.0).abs() < 1e-2);
    }

    #[test]
    fn wronskian_examples() {
        let co = SLCoefficients::flat(0.0, PI).unwrap();
        let op = discretize(&co, 200).unwrap();
        let s = op.sample(f64::sin);
        let cs = op.sample(f64::cos);
        for i in 1..op.dim() - 1 {
            // sin′cos − sin cos′ = 1
            let w = wronskian_form(&co, &op.nodes, &s, &cs, i).unwrap();
            assert!((w - 1.0).abs() < 2.0 * op.h * op.h);
            assert_eq!(wronskian_form(&co, &op.nodes, &s, &s, i).unwrap(), 0.0);
        }
        let s3: Vec<f64> = s.iter().map(|v| 3.0 * v).collect();
        assert_abs_diff_eq!(wronskian_form(&co, &op.nodes, &s, &s3, 0).unwrap(), 0.0, epsilon = 1e-14);
        assert!(wronskian_form(&co, &op.nodes, &s, &cs, 200).is_err());
    }

    fn bump(x: f64, lo: f64, hi: f64) -> f64 {
        if x <= lo || x >= hi {
            0.0
        } else {
            ((x - lo) * (hi - x)).powi(3)
        }
    }

    #[test]
    fn greens_and_dirichlet_on_bumps() {
        let co = SLCoefficients::flat(0.0, 1.0).unwrap();
        let qneg = SLCoefficients::flat(0.0, 1.0).unwrap().with_q_shift(-1.0);
        let mut errs = Vec::new();
        let mut qerrs = Vec::new();
        for n in [100, 200, 400] {
            let op = discretize(&co, n).unwrap();
            let f = op.sample(|x| bump(x, 0.1, 0.8));
            let g = op.sample(|x| bump(x, 0.3, 0.9));
            let r = greens_dirichlet_check(&op, &co, &f, &g).unwrap();
            assert!(r.symmetry < 1e-12);
            assert!(r.dirichlet < 20.0 * op.h * op.h);
            errs.push(r.dirichlet);

            let opq = discretize(&qneg, n).unwrap();
            let r = greens_dirichlet_check(&opq, &qneg, &f, &f).unwrap();
            assert!(r.dirichlet < 40.0 * op.h * op.h);
            qerrs.push(r.dirichlet);
        }
        for ratio in convergence_ratios(&errs).into_iter().chain(convergence_ratios(&qerrs)) {
            assert!((3.5..4.5).contains(&ratio), "{ratio}");
        }
        let op = discretize(&co, 50).unwrap();
        let wide = op.sample(|x| bump(x, -1.0, 2.0));
        let g = op.sample(|x| bump(x, 0.3, 0.9));
        assert!(greens_dirichlet_check(&op, &co, &wide, &g).is_err());
    }

    #[test]
    fn principal_solutions() {
        let co = SLCoefficients::flat(0.0, PI).unwrap();
        let u0 = principal_solution(&co, 0.0, Endpoint::Left, 100).unwrap();
        for (x, v) in u0.x.iter().zip(&u0.values) {
            assert_abs_diff_eq!(*v, *x, epsilon = 1e-12);
        }
        let u1 = principal_solution(&co, 1.0, Endpoint::Left, 100).unwrap();
        let h = PI / 100.0;
        for (x, v) in u1.x.iter().zip(&u1.values) {
            assert!((v - x.sin()).abs() < 0.1 * h.powi(4));
        }
        let lc = SLCoefficients::jacobi(0.5, 0.5).unwrap();
        assert!(principal_solution(&lc, 0.0, Endpoint::Left, 10).is_err());
        assert_eq!(u0.to_table("u").rows.len(), 101);
    }

    #[test]
    fn principal_solution_at_eigenvalue_follows_eigenvector() {
        let co = SLCoefficients::flat(0.0, PI).unwrap();
        let op = discretize(&co, 100).unwrap();
        let (lam, v) = op.eigenpairs().swap_remove(1);
        let u = principal_solution_at(&co, lam, Endpoint::Left, &op.nodes, op.h / 4.0).unwrap();
        let scale = u.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / v.iter().map(|b| b * b).sum::<f64>();
        let err = u.iter().zip(&v).map(|(a, b)| (a - scale * b).abs()).fold(0.0, f64::max);
        let size = u.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        assert!(err / size < 1e-2);
    }

    #[test]
    fn boundary_functional_pairings() {
        let co = SLCoefficients::flat(0.0, 1.0).unwrap();
        let op = discretize(&co, 100).unwrap();
        let bf = boundary_functional(&co, &op, 0.0, Endpoint::Left).unwrap();
        let one = vec![1.0; op.dim()];
        assert_abs_diff_eq!(bf.pair(&op, &one), -1.0, epsilon = 1e-12);
        let lin = op.sample(|x| x);
        assert_abs_diff_eq!(bf.pair(&op, &lin), 0.0, epsilon = 1e-12);
        let vanish = op.sample(|x| x.sin());
        assert!(bf.pair(&op, &vanish).abs() < 10.0 * op.h);
        let f = op.sample(|x| 2.0 + x.cos());
        assert!((bf.pair(&op, &f) + 3.0).abs() <= 10.0 * op.h);
        let col = bf.matrix_column(&op);
        let pair = op.to_matrix_frame(&f).dotc(&col).re;
        assert_abs_diff_eq!(pair, bf.pair(&op, &f), epsilon = 1e-10);
    }

    #[test]
    fn tabulated_matches_flat() {
        let co = SLCoefficients::tabulated(&[[0.0, 1.0, 0.0, 1.0], [1.0, 1.0, 0.0, 1.0]]).unwrap();
        let flat = SLCoefficients::flat(0.0, 1.0).unwrap();
        assert_eq!(discretize(&co, 10).unwrap().eigenvalues(), discretize(&flat, 10).unwrap().eigenvalues());
        assert!(SLCoefficients::tabulated(&[[0.0, 1.0, 0.0, 1.0]]).is_err());
    }

    #[test]
    fn truncation_flags() {
        let co = SLCoefficients::jacobi(0.5, 0.5).unwrap().truncate_limit_circle(0.01).unwrap();
        assert!(co.truncated);
        assert_abs_diff_eq!(co.a, -0.99, epsilon = 1e-15);
        assert_eq!(co.left, EndpointType::Regular);
        assert!(principal_solution(&co, 0.0, Endpoint::Left, 10).is_ok());
    }
}
