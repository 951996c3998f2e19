//! Left-definite spaces and operators of a positive self-adjoint matrix,
//! and the shifted closed forms `t_r[f, g] = ⟨(A−γ)^{r/2} f, (A−γ)^{r/2} g⟩ + γ⟨f, g⟩`.

use crate::error::{Error, Result};
use crate::linalg::{
    c, eigh, inner, mat_power_decomposed, max_abs, CMatrix, CVector, HermitianMatrix,
    SpectralDecomposition,
};
use crate::report::{CheckRow, Report, Table};
use crate::rng;

/// A self-adjoint matrix with its spectral data, lower bound `k` and a
/// shift `γ < k`.
#[derive(Debug, Clone)]
pub struct SpectralOperator {
    matrix: HermitianMatrix,
    decomp: SpectralDecomposition,
    lower_bound: f64,
    shift: f64,
}

impl SpectralOperator {
    /// Decomposes `matrix`; the shift defaults to `k − 1`.
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let decomp = eigh(&matrix)?;
        let lower_bound = decomp.eigenvalues.first().copied().unwrap_or(0.0);
        Ok(Self {
            matrix,
            decomp,
            lower_bound,
            shift: lower_bound - 1.0,
        })
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_diagonal(values))
    }

    pub fn with_shift(mut self, gamma: f64) -> Result<Self> {
        if !(gamma < self.lower_bound) {
            return Err(Error::Shift {
                gamma,
                k: self.lower_bound,
            });
        }
        self.shift = gamma;
        Ok(self)
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomp
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.decomp.eigenvalues
    }

    pub fn lower_bound(&self) -> f64 {
        self.lower_bound
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn power(&self, r: f64) -> Result<HermitianMatrix> {
        mat_power_decomposed(&self.decomp, r)
    }

    /// `(A − γ)^r` through the same eigenbasis.
    pub fn shifted_power(&self, r: f64) -> Result<HermitianMatrix> {
        let shifted = SpectralDecomposition {
            eigenvalues: self.decomp.eigenvalues.iter().map(|l| l - self.shift).collect(),
            eigenvectors: self.decomp.eigenvectors.clone(),
        };
        mat_power_decomposed(&shifted, r)
    }

    fn require_positive(&self) -> Result<()> {
        if self.lower_bound <= 0.0 {
            return Err(Error::NotPositive {
                k: self.lower_bound,
            });
        }
        Ok(())
    }

    /// Min over eigenvectors of `⟨Aφ, φ⟩ − k`; nonnegative by construction
    /// up to rounding.
    pub fn semibound_residual(&self) -> f64 {
        (0..self.dim())
            .map(|j| {
                let v = self.decomp.eigenvectors.column(j).clone_owned();
                inner(&self.matrix.apply(&v), &v).re - self.lower_bound
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// The `r`-th left-definite space: same vectors, inner product
/// `⟨x, y⟩_r = ⟨A^{r/2} x, A^{r/2} y⟩`.
#[derive(Debug, Clone)]
pub struct LeftDefiniteSpace {
    r: f64,
    half_power: HermitianMatrix,
    gram: HermitianMatrix,
    lower_bound: f64,
}

impl LeftDefiniteSpace {
    pub fn r(&self) -> f64 {
        self.r
    }

    /// `A^r`.
    pub fn gram(&self) -> &HermitianMatrix {
        &self.gram
    }

    /// `A^{r/2}`.
    pub fn half_power(&self) -> &HermitianMatrix {
        &self.half_power
    }

    /// `k^r`, the constant of the lower bound `⟨x,x⟩_r ≥ k^r ⟨x,x⟩`.
    pub fn lower_constant(&self) -> f64 {
        self.lower_bound.powf(self.r)
    }

    pub fn dim(&self) -> usize {
        self.gram.dim()
    }
}

pub fn ld_space(a: &SpectralOperator, r: f64) -> Result<LeftDefiniteSpace> {
    a.require_positive()?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Parameter(format!("r must be positive, got {r}")));
    }
    Ok(LeftDefiniteSpace {
        r,
        half_power: a.power(r / 2.0)?,
        gram: a.power(r)?,
        lower_bound: a.lower_bound,
    })
}

fn check_len(space_dim: usize, v: &CVector) -> Result<()> {
    if v.len() != space_dim {
        return Err(Error::Dimension {
            expected: space_dim,
            found: v.len(),
        });
    }
    Ok(())
}

/// `⟨x, y⟩_r`, evaluated from the definition through `A^{r/2}`.
pub fn ld_inner(space: &LeftDefiniteSpace, x: &CVector, y: &CVector) -> Result<crate::linalg::C64> {
    check_len(space.dim(), x)?;
    check_len(space.dim(), y)?;
    Ok(inner(&space.half_power.apply(x), &space.half_power.apply(y)))
}

/// The `r`-th left-definite operator. At finite dimension its action is
/// the matrix of `A` itself; only the domain label changes.
#[derive(Debug, Clone)]
pub struct LeftDefiniteOperator {
    pub r: f64,
    pub action: HermitianMatrix,
    /// Exponent `e` in the domain label `D(A^e)`, `e = (r + 2)/2`.
    pub domain_exponent: f64,
}

impl LeftDefiniteOperator {
    pub fn domain_tag(&self) -> String {
        let e = self.domain_exponent;
        if e.fract() == 0.0 {
            format!("D(A^{})", e as i64)
        } else if (2.0 * e).fract() == 0.0 {
            format!("D(A^{{{}/2}})", (2.0 * e) as i64)
        } else {
            format!("D(A^{{{e}}})")
        }
    }
}

pub fn ld_operator(a: &SpectralOperator, r: f64) -> Result<LeftDefiniteOperator> {
    a.require_positive()?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Parameter(format!("r must be positive, got {r}")));
    }
    Ok(LeftDefiniteOperator {
        r,
        action: a.matrix.clone(),
        domain_exponent: (r + 2.0) / 2.0,
    })
}

/// Matrix of `A_r` in an `H_r`-orthonormal frame: `A^{r/2} A A^{−r/2}`.
fn operator_in_ld_frame(a: &SpectralOperator, space: &LeftDefiniteSpace) -> Result<HermitianMatrix> {
    let inv_half = a.power(-space.r / 2.0)?;
    let m = space.half_power.entries() * a.matrix.entries() * inv_half.entries();
    HermitianMatrix::new((&m + m.adjoint()).scale(0.5))
}

/// `A^r` for integer `r` by repeated multiplication, independent of the
/// eigendecomposition; otherwise the spectral power.
fn gram_by_products(a: &SpectralOperator, r: f64) -> Result<CMatrix> {
    if r.fract() == 0.0 && r >= 1.0 {
        let mut acc = a.matrix.entries().clone();
        for _ in 1..(r as usize) {
            acc = &acc * a.matrix.entries();
        }
        Ok(acc)
    } else {
        Ok(a.power(r)?.into_entries())
    }
}

/// Seeded verification of the left-definite property suite.
///
/// Rows: lower bound `⟨x,x⟩_r ≥ k^r⟨x,x⟩`, the identity
/// `⟨x,y⟩_r = ⟨A^r x, y⟩`, the power semigroup, the eigen-Gram
/// `⟨φ_n, φ_m⟩_r = δ_{nm} λ_n^r`, and equality of multiplicity lists of
/// `A` and `A_r`.
pub fn verify_ld_properties(a: &SpectralOperator, r: f64, samples: usize, seed: u64) -> Result<Report> {
    const TOL: f64 = 1e-9;
    let space = ld_space(a, r)?;
    let mut rng = rng::seeded(seed);
    let norm_a = a.matrix.max_norm().max(1.0);
    let inputs = format!("r={r}, dim={}, samples={samples}, seed={seed}", a.dim());
    let mut report = Report::new(format!("left-definite properties (r = {r})"));

    let gram_ref = gram_by_products(a, r)?;
    let mut lower = 0.0f64;
    let mut duality = 0.0f64;
    for _ in 0..samples {
        let x = rng::complex_vector(&mut rng, a.dim());
        let y = rng::complex_vector(&mut rng, a.dim());
        let scale = norm_a.powf(r) * x.norm().max(y.norm()).powi(2);
        let xx = ld_inner(&space, &x, &x)?.re;
        let gap = xx - space.lower_constant() * x.norm_squared();
        lower = lower.max(-gap / scale);
        let xy = ld_inner(&space, &x, &y)?;
        let direct = inner(&(&gram_ref * &x), &y);
        duality = duality.max((xy - direct).norm() / scale);
    }
    report.push(CheckRow::bounded("lower-bound", &inputs, lower, TOL));
    report.push(CheckRow::bounded("duality", &inputs, duality, TOL));

    let mut semigroup = 0.0f64;
    for &s in &[0.5, 1.0, 1.5, 2.0] {
        let lhs = space.gram.entries() * a.power(s)?.entries();
        let rhs = a.power(r + s)?;
        let denom = a.decomp.spectral_radius().max(1.0).powf(r + s);
        semigroup = semigroup.max(max_abs(&(lhs - rhs.entries())) / denom);
    }
    report.push(CheckRow::bounded("power-semigroup", &inputs, semigroup, TOL));

    // eigen-Gram relative to λ_max^r
    let u = &a.decomp.eigenvectors;
    let g = u.adjoint() * space.gram.entries() * u;
    let lmax = a.decomp.spectral_radius().powf(r);
    let mut eig_gram = 0.0f64;
    let mut eig_table = Table::new("eigen-gram", &["n", "lambda", "gram_nn", "lambda_pow_r"]);
    for i in 0..a.dim() {
        let li = a.decomp.eigenvalues[i].powf(r);
        for j in 0..a.dim() {
            let expect = if i == j { c(li) } else { c(0.0) };
            eig_gram = eig_gram.max((g[(i, j)] - expect).norm() / lmax);
        }
        eig_table.push(vec![
            i.to_string(),
            crate::report::num(a.decomp.eigenvalues[i]),
            crate::report::num(g[(i, i)].re),
            crate::report::num(li),
        ]);
    }
    report.push(CheckRow::bounded("eigen-gram", &inputs, eig_gram, TOL));
    report.tables.push(eig_table);

    let ar = operator_in_ld_frame(a, &space)?;
    let mult_a = a.decomp.multiplicities();
    let mult_ar = eigh(&ar)?.multiplicities();
    let same_counts = mult_a.len() == mult_ar.len()
        && mult_a.iter().zip(&mult_ar).all(|((la, ma), (lb, mb))| {
            ma == mb && (la - lb).abs() <= 1e-9 * norm_a
        });
    report.push(CheckRow::flag(
        "multiplicity",
        format!("{inputs}, clusters={}", mult_a.len()),
        same_counts,
    ));
    Ok(report)
}

/// The closed form `t_r` for integer `r`, using the operator's shift `γ`.
#[derive(Debug, Clone)]
pub struct ClosedFormR {
    pub r: u32,
    pub gamma: f64,
    half_power: HermitianMatrix,
    lower_bound: f64,
}

impl ClosedFormR {
    pub fn new(a: &SpectralOperator, r: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::Parameter("r must be a positive integer".into()));
        }
        if !(a.shift < a.lower_bound) {
            return Err(Error::Shift {
                gamma: a.shift,
                k: a.lower_bound,
            });
        }
        Ok(Self {
            r,
            gamma: a.shift,
            half_power: a.shifted_power(r as f64 / 2.0)?,
            lower_bound: a.lower_bound,
        })
    }

    pub fn eval(&self, f: &CVector, g: &CVector) -> Result<crate::linalg::C64> {
        check_len(self.half_power.dim(), f)?;
        check_len(self.half_power.dim(), g)?;
        let core = inner(&self.half_power.apply(f), &self.half_power.apply(g));
        Ok(core + inner(f, g) * self.gamma)
    }

    /// `γ + (k − γ)^r`, the semi-bound of the form.
    pub fn semibound(&self) -> f64 {
        self.gamma + (self.lower_bound - self.gamma).powi(self.r as i32)
    }
}

/// Seeded check of `t_r[f, f] ≥ (γ + (k−γ)^r)‖f‖²`, with residuals scaled
/// by `‖A‖_max^r ‖f‖²`.
pub fn verify_closed_form(a: &SpectralOperator, r: u32, samples: usize, seed: u64) -> Result<Report> {
    const TOL: f64 = 1e-9;
    let form = ClosedFormR::new(a, r)?;
    let mut rng = rng::seeded(seed);
    let norm_a = a.matrix.max_norm().max(1.0);
    let bound = form.semibound();
    let mut worst = 0.0f64;
    let mut imag = 0.0f64;
    for _ in 0..samples {
        let f = rng::complex_vector(&mut rng, a.dim());
        let scale = norm_a.powi(r as i32) * f.norm_squared();
        let t = form.eval(&f, &f)?;
        worst = worst.max((bound * f.norm_squared() - t.re) / scale);
        imag = imag.max(t.im.abs() / scale);
    }
    let inputs = format!("r={r}, gamma={}, k={}, samples={samples}, seed={seed}", form.gamma, a.lower_bound);
    let mut report = Report::new(format!("closed form t_r (r = {r})"));
    report.push(CheckRow::bounded("closed-form-bound", &inputs, worst.max(0.0), TOL));
    report.push(CheckRow::bounded("closed-form-real", inputs, imag, TOL));
    Ok(report)
}

pub fn pnew_form(a: &SpectralOperator, r: u32, f: &CVector, g: &CVector) -> Result<crate::linalg::C64> {
    ClosedFormR::new(a, r)?.eval(f, g)
}
