//! The scale of Hilbert spaces `H_s(A)` with norms `‖(|A|+I)^{s/2} φ‖`,
//! worked in the eigenbasis of `A`.

use crate::error::{Error, Result};
use crate::leftdef::SpectralOperator;
use crate::linalg::{c, CVector, C64};
use crate::rng;

/// Coefficients of a vector in the eigenbasis of `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleVector {
    pub coeffs: CVector,
}

impl ScaleVector {
    pub fn new(coeffs: CVector) -> Self {
        Self { coeffs }
    }

    pub fn from_real(xs: &[f64]) -> Self {
        Self::new(CVector::from_iterator(xs.len(), xs.iter().copied().map(c)))
    }

    /// Coefficients `U* x` of an ambient vector.
    pub fn from_ambient(a: &SpectralOperator, x: &CVector) -> Self {
        Self::new(a.decomposition().eigenvectors.adjoint() * x)
    }

    /// Model coefficients `n^q`, `n = 1..=len`.
    pub fn power_law(q: f64, len: usize) -> Self {
        Self::new(CVector::from_fn(len, |i, _| c(((i + 1) as f64).powf(q))))
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }
}

fn check(a: &SpectralOperator, phi: &ScaleVector) -> Result<()> {
    if phi.truncation() != a.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            found: phi.truncation(),
        });
    }
    Ok(())
}

/// Applies `(|λ_n| + 1)^{e}` coefficient-wise.
fn weight(a: &SpectralOperator, phi: &ScaleVector, e: f64) -> CVector {
    CVector::from_fn(phi.truncation(), |i, _| {
        phi.coeffs[i] * (a.eigenvalues()[i].abs() + 1.0).powf(e)
    })
}

pub fn hs_norm(a: &SpectralOperator, s: f64, phi: &ScaleVector) -> Result<f64> {
    check(a, phi)?;
    Ok(weight(a, phi, s / 2.0).norm())
}

/// `⟨φ, ψ⟩_{s,−s} = ⟨(|A|+I)^{−s/2} φ, (|A|+I)^{s/2} ψ⟩`.
pub fn duality_pair(a: &SpectralOperator, s: f64, phi: &ScaleVector, psi: &ScaleVector) -> Result<C64> {
    check(a, phi)?;
    check(a, psi)?;
    let left = weight(a, phi, -s / 2.0);
    let right = weight(a, psi, s / 2.0);
    Ok(right.dotc(&left))
}

/// `| ‖(|A|+I)^{t/2} φ‖_{s−t} − ‖φ‖_s |` relative to `‖φ‖_s`.
pub fn isometry_check(a: &SpectralOperator, s: f64, t: f64, phi: &ScaleVector) -> Result<f64> {
    check(a, phi)?;
    let mapped = ScaleVector::new(weight(a, phi, t / 2.0));
    let lhs = hs_norm(a, s - t, &mapped)?;
    let rhs = hs_norm(a, s, phi)?;
    if rhs == 0.0 {
        return Ok(lhs);
    }
    Ok((lhs - rhs).abs() / rhs)
}

/// Model family with `λ_n ≍ n^p` and `|φ_n| ≍ n^q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthModel {
    pub p: f64,
    pub q: f64,
}

impl GrowthModel {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Parameter(format!("growth exponent p must be > 0, got {p}")));
        }
        if !q.is_finite() {
            return Err(Error::Parameter(format!("decay exponent q must be finite, got {q}")));
        }
        Ok(Self { p, q })
    }

    /// Truncated model operator `diag(n^p)`, `n = 1..=len`.
    pub fn operator(&self, len: usize) -> Result<SpectralOperator> {
        let l: Vec<f64> = (1..=len).map(|n| (n as f64).powf(self.p)).collect();
        SpectralOperator::diagonal(&l)
    }

    pub fn vector(&self, len: usize) -> ScaleVector {
        ScaleVector::power_law(self.q, len)
    }

    /// Exponent of the series `Σ n^{ps + 2q}` for `‖φ‖_s²`.
    pub fn series_exponent(&self, s: f64) -> f64 {
        self.p * s + 2.0 * self.q
    }
}

/// `s* = −(2q + 1)/p`: `Σ n^{ps+2q}` converges iff `s < s*`.
pub fn critical_index(model: &GrowthModel) -> f64 {
    -(2.0 * model.q + 1.0) / model.p
}

/// Whether the infinite model vector lies in `H_s`. The boundary `s = s*`
/// is excluded (harmonic divergence).
pub fn membership(model: &GrowthModel, s: f64) -> bool {
    s < critical_index(model)
}

/// Partial sums `(S_N, S_{2N})` of `Σ n^e`.
pub fn partial_sums(exponent: f64, n: usize) -> (f64, f64) {
    let mut s_n = 0.0;
    let mut s_2n = 0.0;
    for k in 1..=2 * n {
        s_2n += (k as f64).powf(exponent);
        if k == n {
            s_n = s_2n;
        }
    }
    (s_n, s_2n)
}

/// Heuristic classifier: divergent iff `S_{2N}/S_N > 1 + 1/(4 ln N)`.
///
/// Convergent series with `e + 1` close to zero converge too slowly for
/// this test and are misread as divergent; keep `|e + 1|` well away from 0.
pub fn partial_sum_converges(exponent: f64, n: usize) -> bool {
    let (s_n, s_2n) = partial_sums(exponent, n);
    s_2n / s_n <= 1.0 + 1.0 / (4.0 * (n as f64).ln())
}

/// Ratio bounds of `‖(|A|+I)^{s/2} φ‖ / ‖(A−γ)^{s/2} φ‖` over seeded samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioBounds {
    pub min: f64,
    pub max: f64,
}

pub fn equivalence_check(a: &SpectralOperator, s: f64, samples: usize, seed: u64) -> Result<RatioBounds> {
    let gamma = a.shift();
    if !(gamma < a.lower_bound()) {
        return Err(Error::Shift {
            gamma,
            k: a.lower_bound(),
        });
    }
    let mut rng = rng::seeded(seed);
    let mut bounds = RatioBounds {
        min: f64::INFINITY,
        max: 0.0,
    };
    for _ in 0..samples {
        let phi = ScaleVector::new(rng::complex_vector(&mut rng, a.dim()));
        let num = weight(a, &phi, s / 2.0).norm();
        let den = CVector::from_fn(a.dim(), |i, _| {
            phi.coeffs[i] * (a.eigenvalues()[i] - gamma).powf(s / 2.0)
        })
        .norm();
        let ratio = num / den;
        bounds.min = bounds.min.min(ratio);
        bounds.max = bounds.max.max(ratio);
    }
    Ok(bounds)
}
