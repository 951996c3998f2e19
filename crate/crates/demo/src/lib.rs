//! wasm-bindgen entry points for the static page in `www/`.
//!
//! Every export is an ordinary Rust function as well, so the native test
//! suite exercises the same code the page calls.

use ldlab::classical::laguerre_identity_check;
use ldlab::extensions::{self, PerturbationSpec};
use ldlab::hscale::{self, GrowthModel};
use ldlab::leftdef::SpectralOperator;
use ldlab::linalg::{c, CVector};
use wasm_bindgen::prelude::*;

const MAX_DIM: usize = 64;
const MAX_STEPS: usize = 400;

fn msg(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Eigenvalue branches of `diag(λ) + t φφ*` for `t` on `steps` evenly spaced
/// points of `[t_min, t_max]`, followed by the multivalued endpoint `t = ∞`.
///
/// Flat row-major output: each row is `t` then `dim` eigenvalues; the final
/// row has `t = ∞`, `dim − 1` eigenvalues and a trailing NaN.
#[wasm_bindgen]
pub fn theta_sweep(lambdas: Vec<f64>, phi: Vec<f64>, t_min: f64, t_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    let dim = lambdas.len();
    if dim == 0 || dim > MAX_DIM {
        return Err(format!("need 1..={MAX_DIM} eigenvalues, got {dim}"));
    }
    if phi.len() != dim {
        return Err(format!("phi has {} entries, expected {dim}", phi.len()));
    }
    if !(2..=MAX_STEPS).contains(&steps) {
        return Err(format!("steps must lie in 2..={MAX_STEPS}, got {steps}"));
    }
    if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
        return Err(format!("need finite t_min < t_max, got {t_min}, {t_max}"));
    }
    let a0 = SpectralOperator::diagonal(&lambdas).map_err(msg)?;
    let mut v = CVector::from_iterator(dim, phi.iter().map(|&x| c(x)));
    let norm = v.norm();
    if norm == 0.0 {
        return Err("phi must be nonzero".into());
    }
    v /= c(norm);
    let mut out = Vec::with_capacity((steps + 1) * (dim + 1));
    for i in 0..steps {
        let t = t_min + (t_max - t_min) * i as f64 / (steps - 1) as f64;
        let spec = PerturbationSpec::rank_one(v.clone(), t).map_err(msg)?;
        out.push(t);
        out.extend(extensions::perturbed_spectrum(&a0, &spec).map_err(msg)?);
    }
    let spec = PerturbationSpec::rank_one(v, f64::INFINITY).map_err(msg)?;
    out.push(f64::INFINITY);
    out.extend(extensions::perturbed_spectrum(&a0, &spec).map_err(msg)?);
    out.push(f64::NAN);
    Ok(out)
}

/// Membership of the model vector `φ_n = n^q` in `H_s` for `λ_n = n^p`.
#[wasm_bindgen]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleProbe {
    /// `s* = −(2q + 1)/p`.
    pub critical: f64,
    /// Exponent `ps + 2q` of the norm series.
    pub exponent: f64,
    /// `S_{2N}/S_N` of the truncated series.
    pub ratio: f64,
    /// Exact answer `s < s*`.
    pub member: bool,
    /// Verdict of the partial-sum classifier.
    pub classified_convergent: bool,
}

#[wasm_bindgen]
pub fn scale_probe(p: f64, q: f64, s: f64, terms: usize) -> Result<ScaleProbe, String> {
    if terms < 2 {
        return Err(format!("terms must be at least 2, got {terms}"));
    }
    if !s.is_finite() {
        return Err(format!("s must be finite, got {s}"));
    }
    let model = GrowthModel::new(p, q).map_err(msg)?;
    let exponent = model.series_exponent(s);
    let (s_n, s_2n) = hscale::partial_sums(exponent, terms);
    Ok(ScaleProbe {
        critical: hscale::critical_index(&model),
        exponent,
        ratio: s_2n / s_n,
        member: hscale::membership(&model, s),
        classified_convergent: hscale::partial_sum_converges(exponent, terms),
    })
}

/// Largest relative residual between the Dirichlet form and the spectral
/// inner product over all Laguerre basis pairs up to `degree`.
#[wasm_bindgen]
pub fn laguerre_residual(alpha: f64, k: f64, n: u32, degree: usize) -> Result<f64, String> {
    if !(1..=12).contains(&n) {
        return Err(format!("n must lie in 1..=12, got {n}"));
    }
    if degree > 40 {
        return Err(format!("degree must be at most 40, got {degree}"));
    }
    Ok(laguerre_identity_check(alpha, k, n, degree).map_err(msg)?.max_residual)
}
