//! Self-adjoint extensions of finite restriction models and finite-rank
//! singular perturbations `A_Θ = A_0 + BΘB*`.
//!
//! A restriction model is `S = {(f, Af) : f ⟂ C}` for a Hermitian `A` and
//! a constraint subspace `C`; it is symmetric with deficiency indices
//! `(dim C, dim C)`.

use crate::error::{Error, Result};
use crate::leftdef::SpectralOperator;
use crate::linalg::{
    c, eigh, CMatrix, CVector, HermitianMatrix, LinearRelation, Subspace, C64,
};
use crate::report::{num, CheckRow, Report, Table};

/// Slack for eigenvalue ordering checks.
pub const ORDER_SLACK: f64 = 1e-10;

/// A Hermitian action together with constraint vectors and the minimal
/// relation they cut out.
#[derive(Debug, Clone)]
pub struct ExtensionProblem {
    pub a: SpectralOperator,
    pub constraints: Subspace,
    pub s: LinearRelation,
}

impl ExtensionProblem {
    pub fn new(a: SpectralOperator, constraints: Subspace) -> Result<Self> {
        let s = minimal_relation(&a, &constraints)?;
        Ok(Self { a, constraints, s })
    }

    pub fn codim(&self) -> usize {
        self.constraints.dim()
    }
}

/// `{(f, Af) : f ∈ C^⊥}`.
pub fn minimal_relation(a: &SpectralOperator, constraints: &Subspace) -> Result<LinearRelation> {
    if constraints.ambient_dim() != a.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            found: constraints.ambient_dim(),
        });
    }
    let dom = constraints.orthocomplement();
    Ok(LinearRelation::restricted(a.matrix().entries(), &dom))
}

#[derive(Debug, Clone)]
pub struct DeficiencyReport {
    pub m_plus: usize,
    pub m_minus: usize,
    /// `{(f, if) ∈ S*}` as a relation.
    pub defect_plus: LinearRelation,
    /// `{(f, −if) ∈ S*}` as a relation.
    pub defect_minus: LinearRelation,
}

impl DeficiencyReport {
    /// The defect space `ker(S* − i)` in `C^n`.
    pub fn space_plus(&self) -> Subspace {
        self.defect_plus.domain()
    }

    pub fn space_minus(&self) -> Subspace {
        self.defect_minus.domain()
    }
}

pub fn deficiency_indices(s: &LinearRelation) -> Result<DeficiencyReport> {
    if !s.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let adj = s.adjoint();
    let n = s.n();
    let defect_plus = adj.intersect(&LinearRelation::scalar(n, C64::new(0.0, 1.0)))?;
    let defect_minus = adj.intersect(&LinearRelation::scalar(n, C64::new(0.0, -1.0)))?;
    Ok(DeficiencyReport {
        m_plus: defect_plus.dim(),
        m_minus: defect_minus.dim(),
        defect_plus,
        defect_minus,
    })
}

/// Checks `S* = S ∔ D̂₊ ∔ D̂₋` in graph space.
pub fn von_neumann_check(s: &LinearRelation) -> Report {
    let mut report = Report::new("von Neumann decomposition");
    let def = match deficiency_indices(s) {
        Ok(d) => d,
        Err(e) => {
            report.push(CheckRow::error("deficiency", e));
            return report;
        }
    };
    let adj = s.adjoint();
    let inputs = format!(
        "dim S = {}, m+ = {}, m- = {}, dim S* = {}",
        s.dim(),
        def.m_plus,
        def.m_minus,
        adj.dim()
    );
    let lhs = adj.dim() as f64;
    let rhs = (s.dim() + def.m_plus + def.m_minus) as f64;
    report.push(CheckRow::bounded("dimension-identity", inputs, (lhs - rhs).abs(), 0.0));
    report.push(CheckRow::flag(
        "equal-indices",
        format!("({}, {})", def.m_plus, def.m_minus),
        def.m_plus == def.m_minus,
    ));

    let pairs = [
        ("S ∩ D+", s, &def.defect_plus),
        ("S ∩ D-", s, &def.defect_minus),
        ("D+ ∩ D-", &def.defect_plus, &def.defect_minus),
    ];
    for (name, a, b) in pairs {
        match a.intersect(b) {
            Ok(i) => report.push(CheckRow::bounded(
                "trivial-intersection",
                name,
                i.dim() as f64,
                0.0,
            )),
            Err(e) => report.push(CheckRow::error("trivial-intersection", e)),
        }
    }
    let total = s
        .sum(&def.defect_plus)
        .and_then(|t| t.sum(&def.defect_minus));
    match total {
        Ok(t) => report.push(CheckRow::flag("sum-equals-adjoint", "S + D+ + D- = S*", t.approx_eq(&adj))),
        Err(e) => report.push(CheckRow::error("sum-equals-adjoint", e)),
    }
    report
}

/// Smallest eigenvalue of the Hermitian form `⟨g, f⟩` on the graph basis,
/// relative to the largest entry's magnitude.
fn form_floor(s: &LinearRelation) -> Result<f64> {
    let m = s.form_matrix();
    if m.is_empty() {
        return Ok(0.0);
    }
    let h = HermitianMatrix::new(m)?;
    let d = eigh(&h)?;
    Ok(d.eigenvalues[0])
}

/// `S_F = S + {0} × (dom S)^⊥` for a nonnegative symmetric `S`.
pub fn friedrichs_relation(s: &LinearRelation) -> Result<LinearRelation> {
    if !s.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let scale = s.form_matrix().norm().max(1.0);
    let floor = form_floor(s)?;
    if floor < -1e-10 * scale {
        return Err(Error::Indefinite { value: floor });
    }
    let dom = s.domain();
    let extra = LinearRelation::from_parts(&Subspace::zero(s.n()), &dom.orthocomplement());
    let sf = s.sum(&extra)?;
    if !sf.is_selfadjoint() {
        return Err(Error::NotSelfAdjoint);
    }
    Ok(sf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    Differ,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Equal => "EQUAL",
            Verdict::Differ => "DIFFER",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PowerExperiment {
    pub verdict: Verdict,
    /// `dom((S_F)^n)`.
    pub friedrichs_power: Subspace,
    /// `dom((S^n)_F)`.
    pub power_friedrichs: Subspace,
}

/// Compares `dom((S_F)^n)` with `dom((S^n)_F)` for integer `n ≥ 1`.
pub fn friedrichs_power_experiment(s: &LinearRelation, n: u32) -> Result<PowerExperiment> {
    if !(1..=4).contains(&n) {
        return Err(Error::Parameter(format!("power must be in 1..=4, got {n}")));
    }
    let sf = friedrichs_relation(s)?;
    let friedrichs_power = sf.power(n)?.domain();
    let sn = s.power(n)?;
    let power_friedrichs = friedrichs_relation(&sn)?.domain();
    let verdict = if friedrichs_power.approx_eq(&power_friedrichs) {
        Verdict::Equal
    } else {
        Verdict::Differ
    };
    Ok(PowerExperiment {
        verdict,
        friedrichs_power,
        power_friedrichs,
    })
}

/// `B` and a self-adjoint relation `Θ` on `C^d`.
#[derive(Debug, Clone)]
pub struct PerturbationSpec {
    b: CMatrix,
    theta: LinearRelation,
    mul: Subspace,
    op: CMatrix,
}

impl PerturbationSpec {
    pub fn new(b: CMatrix, theta: LinearRelation) -> Result<Self> {
        let d = b.ncols();
        if theta.n() != d {
            return Err(Error::Dimension {
                expected: d,
                found: theta.n(),
            });
        }
        let rank = Subspace::span(&b).dim();
        if rank != d {
            return Err(Error::RankDeficient { rank, expected: d });
        }
        if !theta.is_selfadjoint() {
            return Err(Error::NotSelfAdjoint);
        }
        let mul = theta.multivalued_part();
        let op = theta.operator_part();
        let op = (&op + op.adjoint()).scale(0.5);
        Ok(Self { b, theta, mul, op })
    }

    pub fn from_matrix(b: CMatrix, theta: &HermitianMatrix) -> Result<Self> {
        Self::new(b, LinearRelation::from_hermitian(theta))
    }

    /// `Θ = {(Xh, Yh) : h ∈ C^d}`; self-adjoint iff `X*Y` is Hermitian and
    /// `[X; Y]` has rank `d`.
    pub fn from_pair(b: CMatrix, x: &CMatrix, y: &CMatrix) -> Result<Self> {
        Self::new(b, LinearRelation::from_pairs(x, y)?)
    }

    /// Rank-one spec `Θ = [t]`; `t = ∞` gives the purely multivalued `Θ`.
    pub fn rank_one(b: CVector, t: f64) -> Result<Self> {
        let b = CMatrix::from_column_slice(b.len(), 1, b.as_slice());
        if t.is_infinite() {
            Self::new(b, LinearRelation::purely_multivalued(1))
        } else {
            Self::from_matrix(b, &HermitianMatrix::from_diagonal(&[t]))
        }
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn theta(&self) -> &LinearRelation {
        &self.theta
    }

    pub fn rank(&self) -> usize {
        self.b.ncols()
    }

    pub fn mul_part(&self) -> &Subspace {
        &self.mul
    }

    /// Operator part of `Θ` as a `d×d` Hermitian matrix vanishing on `mul Θ`.
    pub fn op_part(&self) -> &CMatrix {
        &self.op
    }
}

fn check_dims(a0: &SpectralOperator, spec: &PerturbationSpec) -> Result<()> {
    if spec.b.nrows() != a0.dim() {
        return Err(Error::Dimension {
            expected: a0.dim(),
            found: spec.b.nrows(),
        });
    }
    Ok(())
}

/// The perturbed relation `A_0 + BΘB*`.
///
/// With `M = mul Θ`, the graph is
/// `{(f, A_0 f + BΘ_op B* f + Bm) : P_M B* f = 0, m ∈ M}`.
pub fn perturb(a0: &SpectralOperator, spec: &PerturbationSpec) -> Result<LinearRelation> {
    check_dims(a0, spec)?;
    let b = &spec.b;
    let h = a0.matrix().entries() + b * &spec.op * b.adjoint();
    let rel = if spec.mul.dim() == 0 {
        LinearRelation::from_matrix(&h)
    } else {
        let qm = spec.mul.basis();
        let dom = Subspace::kernel_of(&(qm.adjoint() * b.adjoint()));
        let n = a0.dim();
        let bm = b * qm;
        let (k, r) = (dom.dim(), bm.ncols());
        let mut g = CMatrix::zeros(2 * n, k + r);
        g.view_mut((0, 0), (n, k)).copy_from(dom.basis());
        g.view_mut((n, 0), (n, k)).copy_from(&(&h * dom.basis()));
        g.view_mut((n, k), (n, r)).copy_from(&bm);
        LinearRelation::from_graph(Subspace::span(&g))?
    };
    if !rel.is_selfadjoint() {
        return Err(Error::NotSelfAdjoint);
    }
    Ok(rel)
}

/// Eigenvalues of a perturbed relation: of the matrix when `Θ` is an
/// operator, of the compressed operator part otherwise.
pub fn perturbed_spectrum(a0: &SpectralOperator, spec: &PerturbationSpec) -> Result<Vec<f64>> {
    let rel = perturb(a0, spec)?;
    if spec.mul.dim() == 0 {
        return regularized_spectrum(a0, spec, 0.0);
    }
    rel.operator_spectrum()
}

/// Eigenvalues of `A_0 + B(Θ_op + t P_M)B*`.
fn regularized_spectrum(a0: &SpectralOperator, spec: &PerturbationSpec, t: f64) -> Result<Vec<f64>> {
    check_dims(a0, spec)?;
    let theta_t = &spec.op + spec.mul.projector() * c(t);
    let m = a0.matrix().entries() + &spec.b * theta_t * spec.b.adjoint();
    Ok(eigh(&HermitianMatrix::new((&m + m.adjoint()).scale(0.5))?)?.eigenvalues)
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub parameter: f64,
    pub eigenvalues: Vec<f64>,
    pub verdict: String,
}

pub const SWEEP_COLUMNS: [&str; 5] = ["trial-seed", "dim", "rank", "parameter", "eigenvalues"];

/// Renders rows as `(trial-seed, dim, rank, parameter, λ_1, …, λ_k, verdict)`.
pub fn sweep_table(name: &str, seed: u64, dim: usize, rank: usize, rows: &[SweepRow]) -> Table {
    let width = rows.iter().map(|r| r.eigenvalues.len()).max().unwrap_or(0);
    let mut header: Vec<String> = ["trial-seed", "dim", "rank", "parameter"].iter().map(|s| s.to_string()).collect();
    header.extend((1..=width).map(|i| format!("lambda{i}")));
    header.push("verdict".into());
    let mut table = Table {
        name: name.into(),
        header,
        rows: Vec::new(),
    };
    for r in rows {
        let mut cells = vec![seed.to_string(), dim.to_string(), rank.to_string(), num(r.parameter)];
        cells.extend(r.eigenvalues.iter().map(|&l| num(l)));
        cells.extend(std::iter::repeat_n(String::new(), width - r.eigenvalues.len()));
        cells.push(r.verdict.clone());
        table.push(cells);
    }
    table
}

#[derive(Debug, Clone)]
pub struct LimitCrosscheck {
    /// Spectrum of the operator part of `perturb`.
    pub target: Vec<f64>,
    pub rows: Vec<SweepRow>,
    /// `max |λ_i(t_last) − target_i|` over the surviving branches.
    pub final_residual: f64,
}

/// Surviving eigenvalues of `A_0 + B(Θ_op ⊕ t I_M)B*` against the
/// multivalued limit. The top `dim M` branches grow with `t` and are
/// reported as diverging.
pub fn limit_crosscheck(a0: &SpectralOperator, spec: &PerturbationSpec, t_list: &[f64], tol: f64) -> Result<LimitCrosscheck> {
    let target = perturbed_spectrum(a0, spec)?;
    let kept = target.len();
    let mut rows = Vec::with_capacity(t_list.len());
    let mut final_residual = f64::NAN;
    for &t in t_list {
        let eig = regularized_spectrum(a0, spec, t)?;
        let residual = eig[..kept]
            .iter()
            .zip(&target)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let diverging = eig.len() - kept;
        let state = if residual <= tol { "converged" } else { "approaching" };
        rows.push(SweepRow {
            parameter: t,
            eigenvalues: eig,
            verdict: format!("{state}; {diverging} diverging; residual {}", num(residual)),
        });
        final_residual = residual;
    }
    Ok(LimitCrosscheck {
        target,
        rows,
        final_residual,
    })
}

/// Family of `Θ` for a sweep.
#[derive(Debug, Clone)]
pub enum ThetaFamily {
    /// `Θ = [t]` with `d = 1`; `t = ∞` is the multivalued endpoint.
    RankOne(Vec<f64>),
    /// Parameterized Hermitian matrices.
    Matrices(Vec<(f64, HermitianMatrix)>),
    /// Parameterized self-adjoint relations.
    Relations(Vec<(f64, LinearRelation)>),
}

#[derive(Debug, Clone)]
pub struct ThetaSweep {
    pub rows: Vec<SweepRow>,
    /// For families whose `Θ` increase in the given order (rank-one with
    /// ascending `t`, or matrices with positive semidefinite increments):
    /// whether every eigenvalue branch is nondecreasing.
    pub monotone: Option<bool>,
}

pub fn theta_sweep(a0: &SpectralOperator, b: &CMatrix, family: &ThetaFamily) -> Result<ThetaSweep> {
    let specs: Vec<(f64, PerturbationSpec)> = match family {
        ThetaFamily::RankOne(ts) => ts
            .iter()
            .map(|&t| Ok((t, PerturbationSpec::rank_one(b.column(0).clone_owned(), t)?)))
            .collect::<Result<_>>()?,
        ThetaFamily::Matrices(ms) => ms
            .iter()
            .map(|(t, m)| Ok((*t, PerturbationSpec::from_matrix(b.clone(), m)?)))
            .collect::<Result<_>>()?,
        ThetaFamily::Relations(rs) => rs
            .iter()
            .map(|(t, r)| Ok((*t, PerturbationSpec::new(b.clone(), r.clone())?)))
            .collect::<Result<_>>()?,
    };
    if matches!(family, ThetaFamily::RankOne(_)) && b.ncols() != 1 {
        return Err(Error::Dimension {
            expected: 1,
            found: b.ncols(),
        });
    }
    let mut rows = Vec::with_capacity(specs.len());
    for (t, spec) in &specs {
        rows.push(SweepRow {
            parameter: *t,
            eigenvalues: perturbed_spectrum(a0, spec)?,
            verdict: String::new(),
        });
    }
    let monotone = if family_is_ordered(family)? {
        let mut ok = true;
        let mut prev: Option<&SweepRow> = None;
        for row in rows.iter_mut() {
            if !row.parameter.is_finite() {
                row.verdict = "limit".into();
                continue;
            }
            let step_ok = match prev {
                Some(p) => p
                    .eigenvalues
                    .iter()
                    .zip(&row.eigenvalues)
                    .all(|(a, b)| *b >= *a - ORDER_SLACK),
                None => true,
            };
            ok &= step_ok;
            row.verdict = if step_ok { "monotone" } else { "decrease" }.into();
            prev = Some(row);
        }
        Some(ok)
    } else {
        None
    };
    Ok(ThetaSweep { rows, monotone })
}

fn family_is_ordered(family: &ThetaFamily) -> Result<bool> {
    match family {
        ThetaFamily::RankOne(ts) => Ok(ts.windows(2).all(|w| w[0] <= w[1])),
        ThetaFamily::Matrices(ms) => {
            for w in ms.windows(2) {
                let step = w[1].1.entries() - w[0].1.entries();
                let d = eigh(&HermitianMatrix::new(step)?)?;
                if d.eigenvalues.first().is_some_and(|&l| l < -ORDER_SLACK) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        ThetaFamily::Relations(_) => Ok(false),
    }
}

/// `λ_i(A) ≤ λ_i(A + tφφ*) ≤ λ_{i+1}(A)` within [`ORDER_SLACK`].
pub fn interlacing_check(a: &SpectralOperator, phi: &CVector, t: f64) -> Result<bool> {
    if phi.len() != a.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            found: phi.len(),
        });
    }
    if (phi.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::Parameter(format!("phi must have unit norm, got {}", phi.norm())));
    }
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("t must be positive, got {t}")));
    }
    let spec = PerturbationSpec::rank_one(phi.clone(), t)?;
    let mu = regularized_spectrum(a, &spec, 0.0)?;
    let lam = a.eigenvalues();
    let n = lam.len();
    Ok((0..n).all(|i| {
        let upper = if i + 1 < n { lam[i + 1] } else { f64::INFINITY };
        lam[i] <= mu[i] + ORDER_SLACK && mu[i] <= upper + ORDER_SLACK
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_abs_diff_eq;

    fn ones3() -> Subspace {
        Subspace::from_vectors(3, &[CVector::from_element(3, c(1.0 / 3f64.sqrt()))]).unwrap()
    }

    #[test]
    fn minimal_relation_cases() {
        let a = SpectralOperator::diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let full = minimal_relation(&a, &Subspace::zero(3)).unwrap();
        assert!(full.is_selfadjoint());
        let s = minimal_relation(&a, &ones3()).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.is_symmetric());
        assert!(!s.is_selfadjoint());
        let z = minimal_relation(&a, &Subspace::full(3)).unwrap();
        assert_eq!(z.dim(), 0);
        assert!(minimal_relation(&a, &Subspace::zero(4)).is_err());
    }

    #[test]
    fn deficiency_examples() {
        let a = SpectralOperator::diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let sa = LinearRelation::from_hermitian(a.matrix());
        let d0 = deficiency_indices(&sa).unwrap();
        assert_eq!((d0.m_plus, d0.m_minus), (0, 0));
        let s = minimal_relation(&a, &ones3()).unwrap();
        let d1 = deficiency_indices(&s).unwrap();
        assert_eq!((d1.m_plus, d1.m_minus), (1, 1));

        let mut r = rng::seeded(3);
        let a6 = SpectralOperator::new(rng::positive_definite(&mut r, 6, 1.0, 5.0)).unwrap();
        let c2 = rng::subspace(&mut r, 6, 2);
        let p = ExtensionProblem::new(a6, c2).unwrap();
        let d2 = deficiency_indices(&p.s).unwrap();
        assert_eq!((d2.m_plus, d2.m_minus), (2, 2));
        assert_eq!(d2.space_plus().dim(), 2);

        let nonsym = LinearRelation::from_matrix(&CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]));
        assert!(matches!(deficiency_indices(&nonsym), Err(Error::NotSymmetric)));
    }

    #[test]
    fn von_neumann_dimensions() {
        let a = SpectralOperator::diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let sa = LinearRelation::from_hermitian(a.matrix());
        assert!(von_neumann_check(&sa).passed());
        let s = minimal_relation(&a, &ones3()).unwrap();
        let rep = von_neumann_check(&s);
        assert!(rep.passed(), "{}", rep.to_text());
        assert_eq!(s.adjoint().dim(), 4);
    }

    #[test]
    fn friedrichs_small_example() {
        let a = SpectralOperator::diagonal(&[1.0, 2.0]).unwrap();
        let s = minimal_relation(&a, &Subspace::coordinate(2, &[1])).unwrap();
        let sf = friedrichs_relation(&s).unwrap();
        assert!(sf.is_selfadjoint());
        assert!(s.is_subset_of(&sf));
        assert!(sf.multivalued_part().approx_eq(&Subspace::coordinate(2, &[1])));
        assert!(sf.domain().approx_eq(&s.domain()));
        assert_eq!(sf.operator_spectrum().unwrap().len(), 1);
        assert_abs_diff_eq!(sf.operator_spectrum().unwrap()[0], 1.0, epsilon = 1e-12);

        let sa = LinearRelation::from_hermitian(a.matrix());
        assert!(friedrichs_relation(&sa).unwrap().approx_eq(&sa));

        let neg = LinearRelation::from_hermitian(&HermitianMatrix::from_diagonal(&[-1.0, 2.0]));
        assert!(matches!(friedrichs_relation(&neg), Err(Error::Indefinite { .. })));
    }

    #[test]
    fn power_experiment_trivial_cases() {
        let mut r = rng::seeded(11);
        let a = SpectralOperator::new(rng::positive_definite(&mut r, 6, 1.0, 4.0)).unwrap();
        let sa = LinearRelation::from_hermitian(a.matrix());
        assert_eq!(friedrichs_power_experiment(&sa, 2).unwrap().verdict, Verdict::Equal);
        let s = minimal_relation(&a, &rng::subspace(&mut r, 6, 1)).unwrap();
        assert_eq!(friedrichs_power_experiment(&s, 1).unwrap().verdict, Verdict::Equal);
        let e = friedrichs_power_experiment(&s, 2).unwrap();
        assert_eq!(e.friedrichs_power.dim(), 5);
        assert_eq!(e.power_friedrichs.dim(), 4);
        assert_eq!(e.verdict, Verdict::Differ);
        assert!(friedrichs_power_experiment(&s, 5).is_err());
    }

    #[test]
    fn perturbation_examples() {
        let a0 = SpectralOperator::diagonal(&[1.0, 2.0]).unwrap();
        let e1 = CVector::from_vec(vec![c(1.0), c(0.0)]);
        let spec = PerturbationSpec::rank_one(e1.clone(), 0.5).unwrap();
        let ev = perturbed_spectrum(&a0, &spec).unwrap();
        assert_abs_diff_eq!(ev[0], 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1], 2.0, epsilon = 1e-12);

        let inf = PerturbationSpec::rank_one(e1, f64::INFINITY).unwrap();
        let rel = perturb(&a0, &inf).unwrap();
        assert!(rel.multivalued_part().approx_eq(&Subspace::coordinate(2, &[0])));
        let ev = rel.operator_spectrum().unwrap();
        assert_eq!(ev.len(), 1);
        assert_abs_diff_eq!(ev[0], 2.0, epsilon = 1e-12);

        let a13 = SpectralOperator::diagonal(&[1.0, 3.0]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b = CVector::from_vec(vec![c(s), c(s)]);
        let ev = perturbed_spectrum(&a13, &PerturbationSpec::rank_one(b, 1.0).unwrap()).unwrap();
        let r5 = 5f64.sqrt();
        assert_abs_diff_eq!(ev[0], (5.0 - r5) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1], (5.0 + r5) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn spec_validation() {
        let b = CMatrix::from_column_slice(2, 2, &[c(1.0), c(0.0), c(2.0), c(0.0)]);
        let theta = HermitianMatrix::identity(2);
        assert!(matches!(
            PerturbationSpec::from_matrix(b, &theta),
            Err(Error::RankDeficient { rank: 1, expected: 2 })
        ));
        let b = CMatrix::identity(2, 2);
        let skew = LinearRelation::from_matrix(&CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]));
        assert!(matches!(PerturbationSpec::new(b.clone(), skew), Err(Error::NotSelfAdjoint)));
        // pair sugar: X = diag(1, 0), Y = diag(t, 1) -> Θ = [t] ⊕ ∞
        let x = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0), c(0.0)]));
        let y = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.5), c(1.0)]));
        let spec = PerturbationSpec::from_pair(b, &x, &y).unwrap();
        assert_eq!(spec.mul_part().dim(), 1);
        assert_abs_diff_eq!(spec.op_part()[(0, 0)].re, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn matrix_theta_is_plain_sum() {
        let mut r = rng::seeded(5);
        let a0 = SpectralOperator::new(rng::positive_definite(&mut r, 5, 1.0, 6.0)).unwrap();
        let b = rng::complex_matrix(&mut r, 5, 2);
        let theta = rng::positive_definite(&mut r, 2, -1.0, 1.0);
        let spec = PerturbationSpec::from_matrix(b.clone(), &theta).unwrap();
        let ev = perturbed_spectrum(&a0, &spec).unwrap();
        let direct = a0.matrix().entries() + &b * theta.entries() * b.adjoint();
        let d = eigh(&HermitianMatrix::new((&direct + direct.adjoint()).scale(0.5)).unwrap()).unwrap();
        for (x, y) in ev.iter().zip(&d.eigenvalues) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }

    #[test]
    fn limit_matches_multivalued() {
        let a0 = SpectralOperator::diagonal(&[1.0, 2.0]).unwrap();
        let e1 = CVector::from_vec(vec![c(1.0), c(0.0)]);
        let spec = PerturbationSpec::rank_one(e1, f64::INFINITY).unwrap();
        let lc = limit_crosscheck(&a0, &spec, &[1e2, 1e4, 1e8], 1e-6).unwrap();
        assert!(lc.final_residual <= 1e-6);
        assert!(lc.rows[2].verdict.starts_with("converged"));

        let finite = PerturbationSpec::rank_one(CVector::from_vec(vec![c(1.0), c(0.0)]), 0.5).unwrap();
        let lc = limit_crosscheck(&a0, &finite, &[1.0, 1e3], 1e-12).unwrap();
        assert_eq!(lc.rows[0].eigenvalues, lc.rows[1].eigenvalues);
    }

    #[test]
    fn rank_one_sweep_monotone() {
        let a0 = SpectralOperator::diagonal(&[1.0, 2.0, 4.0]).unwrap();
        let b = CMatrix::from_column_slice(3, 1, &[c(0.6), c(0.0), c(0.8)]);
        let ts: Vec<f64> = (0..=10).map(f64::from).chain([f64::INFINITY]).collect();
        let sw = theta_sweep(&a0, &b, &ThetaFamily::RankOne(ts)).unwrap();
        assert_eq!(sw.monotone, Some(true));
        for (x, y) in sw.rows[0].eigenvalues.iter().zip(a0.eigenvalues()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
        assert_eq!(sw.rows.last().unwrap().eigenvalues.len(), 2);
        let t = sweep_table("sweep", 1, 3, 1, &sw.rows);
        assert_eq!(t.header.len(), 4 + 3 + 1);
        assert_eq!(t.rows.last().unwrap()[6], "");
    }

    #[test]
    fn interlacing_examples() {
        let a = SpectralOperator::diagonal(&[1.0, 3.0]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = CVector::from_vec(vec![c(s), c(s)]);
        assert!(interlacing_check(&a, &phi, 1.0).unwrap());
        assert!(interlacing_check(&a, &phi, 1e-14).unwrap());
        assert!(interlacing_check(&a, &(phi.clone() * c(2.0)), 1.0).is_err());
        assert!(interlacing_check(&a, &phi, 0.0).is_err());
    }
}
