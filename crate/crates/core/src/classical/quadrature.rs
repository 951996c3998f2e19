//! Generalized Gauss-Laguerre rules for the weight `t^α e^{−t}` on `(0, ∞)`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::laguerre::{laguerre_values, squared_norm};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub alpha: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Highest polynomial degree integrated exactly, `2m − 1`.
    pub fn exactness_degree(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Nodes from the Golub-Welsch eigenproblem, polished by Newton on
/// `L_m^α`; weights from `Γ(m+α+1) / (m! x_i L_m^α'(x_i)²)`.
pub fn gauss_quadrature(alpha: f64, m: usize) -> Result<QuadratureRule> {
    if !(alpha > -1.0) {
        return Err(Error::Parameter(format!("weight exponent must exceed -1, got {alpha}")));
    }
    if m == 0 {
        return Err(Error::Parameter("node count must be at least 1".into()));
    }
    let mut jacobi = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        jacobi[(i, i)] = 2.0 * i as f64 + alpha + 1.0;
        if i + 1 < m {
            let b = ((i + 1) as f64 * (i as f64 + 1.0 + alpha)).sqrt();
            jacobi[(i, i + 1)] = b;
            jacobi[(i + 1, i)] = b;
        }
    }
    let eig = SymmetricEigen::try_new(jacobi, 1e-15, 10_000).ok_or(Error::Quadrature { nodes: m })?;
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    let norm_m = squared_norm(alpha, m);
    let mut weights = Vec::with_capacity(m);
    for x in nodes.iter_mut() {
        // Newton stalls at rounding level for large m; accept a final step
        // well below the node spacing.
        let mut step = f64::INFINITY;
        for _ in 0..20 {
            let (val, der) = value_and_derivative(alpha, m, *x);
            step = val / der;
            *x -= step;
            if step.abs() <= 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        if step.abs() > 1e-10 * x.abs().max(1.0) || !x.is_finite() || *x <= 0.0 {
            return Err(Error::Quadrature { nodes: m });
        }
        let (_, der) = value_and_derivative(alpha, m, *x);
        weights.push(norm_m / (*x * der * der));
    }
    Ok(QuadratureRule {
        alpha,
        nodes,
        weights,
    })
}

fn value_and_derivative(alpha: f64, m: usize, x: f64) -> (f64, f64) {
    let val = laguerre_values(alpha, m, x)[m];
    // d/dx L_m^α = −L_{m−1}^{α+1}
    let der = -laguerre_values(alpha + 1.0, m - 1, x)[m - 1];
    (val, der)
}
