use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// `L_0^α(x), …, L_n^α(x)` from the three-term recurrence
/// `(m+1) L_{m+1} = (2m+1+α−x) L_m − (m+α) L_{m−1}`.
pub fn laguerre_values(alpha: f64, n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(1.0 + alpha - x);
    for m in 1..n {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 + alpha - x) * out[m] - (mf + alpha) * out[m - 1]) / (mf + 1.0);
        out.push(next);
    }
    out
}

/// `‖L_n^α‖² = Γ(n+α+1)/n!`, built as `Γ(α+1)·Π_{m=1}^n (m+α)/m`.
pub fn squared_norm(alpha: f64, n: usize) -> f64 {
    (1..=n).fold(gamma(alpha + 1.0), |acc, m| acc * (m as f64 + alpha) / m as f64)
}

/// Laguerre polynomials `L_0^α … L_N^α` with their squared norms in
/// `L²((0,∞), t^α e^{−t})`.
#[derive(Debug, Clone)]
pub struct LaguerreBasis {
    alpha: f64,
    max_degree: usize,
    norms: Vec<f64>,
}

impl LaguerreBasis {
    pub fn new(alpha: f64, max_degree: usize) -> Result<Self> {
        if !(alpha > -1.0 && alpha.is_finite()) {
            return Err(Error::Parameter(format!("alpha must satisfy alpha > -1, got {alpha}")));
        }
        let norms = (0..=max_degree).map(|n| squared_norm(alpha, n)).collect();
        Ok(Self {
            alpha,
            max_degree,
            norms,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn squared_norm(&self, n: usize) -> f64 {
        self.norms[n]
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.max_degree {
            return Err(Error::Parameter(format!(
                "degree {n} exceeds basis maximum {}",
                self.max_degree
            )));
        }
        Ok(())
    }

    pub fn eval(&self, n: usize, x: f64) -> Result<f64> {
        self.check_degree(n)?;
        Ok(laguerre_values(self.alpha, n, x)[n])
    }

    /// `d/dx L_n^α(x) = −L_{n−1}^{α+1}(x)`.
    pub fn eval_derivative(&self, n: usize, x: f64) -> Result<f64> {
        self.check_degree(n)?;
        if n == 0 {
            return Ok(0.0);
        }
        Ok(-laguerre_values(self.alpha + 1.0, n - 1, x)[n - 1])
    }

    /// The basis element `L_n` as a coefficient vector.
    pub fn element(&self, n: usize) -> Result<PolyInLaguerre> {
        self.check_degree(n)?;
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        Ok(PolyInLaguerre { coeffs })
    }

    /// Expansion of `x^d`:
    /// `x^d = Σ_m (−1)^m · d!/(d−m)! · Γ(d+α+1)/Γ(m+α+1) · L_m^α`.
    pub fn monomial(&self, d: usize) -> Result<PolyInLaguerre> {
        self.check_degree(d)?;
        let coeffs = (0..=d)
            .map(|m| {
                let falling: f64 = ((d - m + 1)..=d).map(|i| i as f64).product();
                let ratio: f64 = ((m + 1)..=d).map(|i| i as f64 + self.alpha).product();
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * falling * ratio
            })
            .collect();
        Ok(PolyInLaguerre { coeffs })
    }
}

/// A polynomial `Σ c_m L_m^α`; the parameter `α` is carried by the basis
/// it is paired with.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyInLaguerre {
    pub coeffs: Vec<f64>,
}

impl PolyInLaguerre {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    /// Degree of the highest nonzero coefficient, `None` for the zero
    /// polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }

    /// `j`-th derivative, expanded in `L^{α+j}`: coefficient `m` is
    /// `(−1)^j c_{m+j}`.
    pub fn derivative(&self, j: usize) -> PolyInLaguerre {
        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        PolyInLaguerre {
            coeffs: self.coeffs.iter().skip(j).map(|c| sign * c).collect(),
        }
    }

    /// Value at `x` when expanded in `L^{alpha}`.
    pub fn eval(&self, alpha: f64, x: f64) -> f64 {
        if self.coeffs.is_empty() {
            return 0.0;
        }
        let vals = laguerre_values(alpha, self.coeffs.len() - 1, x);
        self.coeffs.iter().zip(vals).map(|(c, l)| c * l).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn low_degree_values() {
        let b = LaguerreBasis::new(1.0, 4).unwrap();
        assert_eq!(b.eval(0, 3.7).unwrap(), 1.0);
        assert_eq!(b.eval(1, 0.0).unwrap(), 2.0);
        assert_eq!(b.eval_derivative(1, 0.3).unwrap(), -1.0);
        assert!(b.eval(5, 0.0).is_err());
    }

    #[test]
    fn derivative_identity_against_finite_difference() {
        let b = LaguerreBasis::new(0.5, 8).unwrap();
        let h = 1e-6;
        for n in 0..=8 {
            for &x in &[0.3, 1.7, 4.2] {
                let fd = (b.eval(n, x + h).unwrap() - b.eval(n, x - h).unwrap()) / (2.0 * h);
                assert_abs_diff_eq!(b.eval_derivative(n, x).unwrap(), fd, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn monomial_expansion_reproduces_powers() {
        for &alpha in &[0.0, 0.5, 2.0] {
            let b = LaguerreBasis::new(alpha, 8).unwrap();
            // x = (α+1) L_0 − L_1
            assert_eq!(b.monomial(1).unwrap().coeffs, vec![alpha + 1.0, -1.0]);
            for d in 0..=8 {
                let p = b.monomial(d).unwrap();
                for &x in &[0.25f64, 1.5, 3.0] {
                    let expect = x.powi(d as i32);
                    let vals = laguerre_values(alpha, d, x);
                    let scale: f64 = p.coeffs.iter().zip(&vals).map(|(c, l)| (c * l).abs()).sum();
                    assert_abs_diff_eq!(p.eval(alpha, x), expect, epsilon = 1e-14 * scale);
                }
            }
        }
    }

    #[test]
    fn derivative_of_expansion() {
        // p = x^3 -> p' = 3x^2, p'' = 6x, evaluated through L^{α+j}
        let alpha = 0.5;
        let b = LaguerreBasis::new(alpha, 3).unwrap();
        let p = b.monomial(3).unwrap();
        for &x in &[0.4, 2.2] {
            assert_abs_diff_eq!(p.derivative(1).eval(alpha + 1.0, x), 3.0 * x * x, epsilon = 1e-12);
            assert_abs_diff_eq!(p.derivative(2).eval(alpha + 2.0, x), 6.0 * x, epsilon = 1e-12);
            assert_abs_diff_eq!(p.derivative(3).eval(alpha + 3.0, x), 6.0, epsilon = 1e-12);
        }
        assert_eq!(p.derivative(4).degree(), None);
    }

    #[test]
    fn rejects_alpha_at_or_below_minus_one() {
        assert!(LaguerreBasis::new(-1.0, 3).is_err());
        assert!(LaguerreBasis::new(-2.0, 3).is_err());
    }
}
