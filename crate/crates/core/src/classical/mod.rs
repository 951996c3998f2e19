//! The Laguerre operator `A = ℓ + k`, `ℓ[f] = −t^{−α}e^{t}(t^{α+1}e^{−t}f′)′`,
//! acting on `L²((0,∞), t^α e^{−t})`, and its explicit `n`-th
//! left-definite inner product
//!
//! ```text
//! ⟨p, q⟩_n = Σ_{j=0}^{n} b_j(n,k) ∫ p^{(j)} q^{(j)} t^{α+j} e^{−t} dt,
//! b_j(n,k) = Σ_{i=0}^{j} (−1)^{i+j}/j! · C(j,i) · (k+i)^n.
//! ```
//!
//! The explicit form is evaluated by Gauss quadrature; the spectral side
//! `⟨A^n p, q⟩ = Σ (m+k)^n c_m d_m ‖L_m‖²` uses only the eigen-expansion.
//! Agreement of the two is the identity checked by
//! [`laguerre_identity_check`].

mod laguerre;
mod quadrature;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

pub use laguerre::{laguerre_values, squared_norm, LaguerreBasis, PolyInLaguerre};
pub use quadrature::{gauss_quadrature, QuadratureRule};

use crate::error::{Error, Result};
use crate::report::{num, Table};

fn binomial(n: u32, k: u32) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// `b_j(n, k)` in exact integer arithmetic for integer `k`.
///
/// `j!·b_j(n,k)` is the `j`-th forward difference of `x^n` at `k`, which
/// is divisible by `j!`, so the result is an integer.
pub fn bj_coeff_exact(n: u32, k: i64, j: u32) -> Result<i128> {
    if j > n {
        return Err(Error::Parameter(format!("b_j needs j <= n, got j = {j}, n = {n}")));
    }
    let mut sum: i128 = 0;
    for i in 0..=j {
        let sign = if (i + j).is_multiple_of(2) { 1 } else { -1 };
        sum += sign * binomial(j, i) * ((k + i as i64) as i128).pow(n);
    }
    let fact: i128 = (1..=j as i128).product();
    debug_assert_eq!(sum % fact, 0);
    Ok(sum / fact)
}

/// `b_j(n, k)` for real `k > 0`; exact for integer `k`.
pub fn bj_coeff(n: u32, k: f64, j: u32) -> Result<f64> {
    if j > n {
        return Err(Error::Parameter(format!("b_j needs j <= n, got j = {j}, n = {n}")));
    }
    if !(k > 0.0) {
        return Err(Error::Parameter(format!("k must be positive, got {k}")));
    }
    if k.fract() == 0.0 && k < 1e6 {
        return Ok(bj_coeff_exact(n, k as i64, j)? as f64);
    }
    let fact: f64 = (1..=j).map(f64::from).product();
    let sum: f64 = (0..=j)
        .map(|i| {
            let sign = if (i + j).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binomial(j, i) as f64 * (k + f64::from(i)).powi(n as i32)
        })
        .sum();
    Ok(sum / fact)
}

/// Power `n`, shift `k` and the coefficients `b_0 … b_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletFormSpec {
    pub n: u32,
    pub k: f64,
    pub b: Vec<f64>,
}

impl DirichletFormSpec {
    pub fn new(n: u32, k: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("power n must be at least 1".into()));
        }
        let b = (0..=n).map(|j| bj_coeff(n, k, j)).collect::<Result<Vec<_>>>()?;
        Ok(Self { n, k, b })
    }
}

/// `A^n p` with `A = ℓ + k`: `c_m ↦ (m + k)^n c_m`.
pub fn laguerre_apply_a(k: f64, n: u32, p: &PolyInLaguerre) -> PolyInLaguerre {
    PolyInLaguerre::new(
        p.coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| (m as f64 + k).powi(n as i32) * c)
            .collect(),
    )
}

fn check_degree(basis: &LaguerreBasis, p: &PolyInLaguerre) -> Result<()> {
    if p.coeffs.len() > basis.max_degree() + 1 {
        return Err(Error::Parameter(format!(
            "polynomial with {} coefficients exceeds basis degree {}",
            p.coeffs.len(),
            basis.max_degree()
        )));
    }
    Ok(())
}

/// Caches Gauss rules keyed by `(j, node count)`.
#[derive(Default)]
struct RuleCache {
    rules: BTreeMap<(usize, usize), QuadratureRule>,
}

impl RuleCache {
    fn get(&mut self, alpha: f64, j: usize, m: usize) -> Result<&QuadratureRule> {
        Ok(match self.rules.entry((j, m)) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(gauss_quadrature(alpha + j as f64, m)?),
        })
    }
}

fn dirichlet_inner_cached(
    spec: &DirichletFormSpec,
    basis: &LaguerreBasis,
    p: &PolyInLaguerre,
    q: &PolyInLaguerre,
    cache: &mut RuleCache,
) -> Result<f64> {
    check_degree(basis, p)?;
    check_degree(basis, q)?;
    let (Some(dp), Some(dq)) = (p.degree(), q.degree()) else {
        return Ok(0.0);
    };
    let nodes = (dp + dq) / 2 + 1;
    let alpha = basis.alpha();
    let mut total = 0.0;
    for j in 0..=spec.n as usize {
        if j > dp || j > dq {
            break;
        }
        let pj = p.derivative(j);
        let qj = q.derivative(j);
        let aj = alpha + j as f64;
        let rule = cache.get(alpha, j, nodes)?;
        let integral = rule.integrate(|t| pj.eval(aj, t) * qj.eval(aj, t));
        total += spec.b[j] * integral;
    }
    Ok(total)
}

/// The explicit form `Σ_j b_j ∫ p^{(j)} q^{(j)} t^{α+j} e^{−t}` by
/// quadrature with `⌊(deg p + deg q)/2⌋ + 1` nodes per term.
pub fn dirichlet_inner(
    spec: &DirichletFormSpec,
    basis: &LaguerreBasis,
    p: &PolyInLaguerre,
    q: &PolyInLaguerre,
) -> Result<f64> {
    dirichlet_inner_cached(spec, basis, p, q, &mut RuleCache::default())
}

/// `⟨A^n p, q⟩ = Σ_m (m+k)^n c_m d_m ‖L_m‖²`.
pub fn spectral_inner(basis: &LaguerreBasis, k: f64, n: u32, p: &PolyInLaguerre, q: &PolyInLaguerre) -> Result<f64> {
    check_degree(basis, p)?;
    check_degree(basis, q)?;
    Ok(p.coeffs
        .iter()
        .zip(&q.coeffs)
        .enumerate()
        .map(|(m, (c, d))| (m as f64 + k).powi(n as i32) * c * d * basis.squared_norm(m))
        .sum())
}

/// Result of comparing the explicit and spectral inner products over all
/// basis pairs `(L_i, L_j)`, `i, j ≤ max_degree`.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub max_residual: f64,
    pub table: Table,
}

pub const IDENTITY_COLUMNS: [&str; 8] = ["alpha", "k", "n", "degP", "degQ", "dirichlet", "spectral", "residual"];

pub fn laguerre_identity_check(alpha: f64, k: f64, n: u32, max_degree: usize) -> Result<IdentityCheck> {
    if !(k > 0.0) {
        return Err(Error::Parameter(format!("k must be positive, got {k}")));
    }
    let basis = LaguerreBasis::new(alpha, max_degree)?;
    let spec = DirichletFormSpec::new(n, k)?;
    let mut cache = RuleCache::default();
    let mut table = Table::new(format!("laguerre-identity-a{alpha}-k{k}-n{n}"), &IDENTITY_COLUMNS);
    let mut max_residual = 0.0f64;
    for i in 0..=max_degree {
        let p = basis.element(i)?;
        for j in 0..=max_degree {
            let q = basis.element(j)?;
            let d = dirichlet_inner_cached(&spec, &basis, &p, &q, &mut cache)?;
            let s = spectral_inner(&basis, k, n, &p, &q)?;
            let residual = (d - s).abs() / (1.0 + s.abs());
            max_residual = max_residual.max(residual);
            table.push(vec![
                num(alpha),
                num(k),
                n.to_string(),
                i.to_string(),
                j.to_string(),
                num(d),
                num(s),
                num(residual),
            ]);
        }
    }
    Ok(IdentityCheck { max_residual, table })
}

/// Jacobi eigenvalues `m(m + α + β + 1)`, `m = 0..=max`.
pub fn jacobi_spectrum(alpha: f64, beta: f64, max: usize) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::Parameter(format!(
            "Jacobi parameters must be positive, got alpha = {alpha}, beta = {beta}"
        )));
    }
    Ok((0..=max)
        .map(|m| {
            let m = m as f64;
            m * (m + alpha + beta + 1.0)
        })
        .collect())
}
