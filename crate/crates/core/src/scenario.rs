//! JSON scenarios: validation that reports every problem at once, dispatch
//! to the experiment harnesses, and deterministic report output.
//!
//! A config has the keys `operatorSpec` (optional), `experiment`,
//! `params`, `seed` and `tolerances`; anything else is rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde_json::{Map, Value};

use crate::classical::{self, bj_coeff_exact, DirichletFormSpec, LaguerreBasis};
use crate::error::{Error, Result};
use crate::extensions::{self, PerturbationSpec, SweepRow, ThetaFamily, Verdict};
use crate::hscale::{self, GrowthModel, ScaleVector};
use crate::leftdef::{self, SpectralOperator};
use crate::linalg::{eigh, read_matrix_csv, CMatrix, CVector, HermitianMatrix, LinearRelation};
use crate::report::{num, CheckRow, Report, Table};
use crate::rng;
use crate::sl::{self, BoundaryCondition, DiscreteOperator, Endpoint, SLCoefficients};

/// Environment variable that overrides the config seed.
pub const SEED_ENV: &str = "LDLAB_SEED";

#[derive(Debug, Clone, PartialEq)]
pub enum CoeffSpec {
    Flat { a: f64, b: f64 },
    Jacobi { alpha: f64, beta: f64 },
    Laguerre { alpha: f64, length: f64 },
    /// CSV with header `x,p,q,w`.
    Tabulated { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    /// `diag(n^p)`, `n = 1..=N`, with model vectors `n^q`.
    DiagGrowth { p: f64, q: f64, n: usize },
    /// Complex matrix CSV, `re,im` pairs per entry.
    MatrixFile { path: PathBuf },
    Sl {
        coeffs: CoeffSpec,
        n: usize,
        bc: Option<BoundaryCondition>,
        delta: Option<f64>,
    },
    /// `diag(m + k)`, `m = 0..=N`: the Laguerre operator `ℓ + k` on `L_0 … L_N`.
    Laguerre { alpha: f64, k: f64, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    LeftdefVerify,
    LaguerreIdentity,
    Scale,
    Extensions,
    FriedrichsConjecture,
    PerturbSweep,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::LeftdefVerify,
        Experiment::LaguerreIdentity,
        Experiment::Scale,
        Experiment::Extensions,
        Experiment::FriedrichsConjecture,
        Experiment::PerturbSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::LeftdefVerify => "leftdef-verify",
            Experiment::LaguerreIdentity => "laguerre-identity",
            Experiment::Scale => "scale",
            Experiment::Extensions => "extensions",
            Experiment::FriedrichsConjecture => "friedrichs-conjecture",
            Experiment::PerturbSweep => "perturb-sweep",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }

    /// Tolerance keys accepted under `tolerances`, with defaults.
    pub fn tolerance_defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            Experiment::LeftdefVerify => &[("property", 1e-9), ("form", 1e-9)],
            Experiment::LaguerreIdentity => &[("identity", 1e-8), ("hand", 1e-12)],
            Experiment::Scale => &[("isometry", 1e-10), ("duality", 1e-12)],
            Experiment::Extensions | Experiment::FriedrichsConjecture => &[],
            Experiment::PerturbSweep => &[("limit", 1e-6), ("matrix", 1e-10)],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    LeftdefVerify {
        r: Vec<f64>,
        samples: usize,
        form_samples: usize,
        dim: usize,
        trials: usize,
        spectrum: (f64, f64),
        gamma: Option<f64>,
        degenerate: bool,
    },
    LaguerreIdentity {
        alpha: Vec<f64>,
        k: f64,
        n: Vec<u32>,
        degree: usize,
    },
    Scale {
        p: f64,
        q: f64,
        n: usize,
        s: Vec<f64>,
        t: Vec<f64>,
        samples: usize,
        grid_p: Vec<f64>,
        grid_q: Vec<f64>,
        grid_s: Vec<f64>,
        exclusion: f64,
        terms: usize,
    },
    Extensions {
        dims: Vec<usize>,
        codims: Vec<usize>,
        trials: usize,
        spectrum: (f64, f64),
    },
    FriedrichsConjecture {
        dim: usize,
        codims: Vec<usize>,
        powers: Vec<u32>,
        trials: usize,
        spectrum: (f64, f64),
    },
    PerturbSweep {
        dim: usize,
        rank: usize,
        t: Vec<f64>,
        trials: usize,
        limit_t: f64,
        lambda: f64,
        spectrum: (f64, f64),
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedSource {
    Default,
    Config,
    Env,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub operator: Option<OperatorSpec>,
    pub experiment: Experiment,
    pub params: Params,
    pub seed: u64,
    pub seed_source: SeedSource,
    pub tolerances: BTreeMap<String, f64>,
}

impl ScenarioConfig {
    pub fn tolerance(&self, key: &str) -> f64 {
        self.tolerances.get(key).copied().unwrap_or_else(|| {
            self.experiment
                .tolerance_defaults()
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .expect("tolerance key belongs to the experiment")
        })
    }

    /// Applies an `LDLAB_SEED` value, if one is set.
    pub fn with_seed_override(mut self, value: Option<&str>) -> Result<Self> {
        if let Some(v) = value {
            let seed = v
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::Config(vec![format!("{SEED_ENV}: expected a non-negative integer, got {v:?}")]))?;
            self.seed = seed;
            self.seed_source = SeedSource::Env;
        }
        Ok(self)
    }

    /// Resolves relative file paths in the operator spec against `base`.
    pub fn resolve_paths(mut self, base: &Path) -> Self {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match &mut self.operator {
            Some(OperatorSpec::MatrixFile { path }) => fix(path),
            Some(OperatorSpec::Sl {
                coeffs: CoeffSpec::Tabulated { path },
                ..
            }) => fix(path),
            _ => {}
        }
        self
    }
}

struct Obj<'v> {
    ctx: String,
    map: &'v Map<String, Value>,
    seen: BTreeSet<String>,
}

impl<'v> Obj<'v> {
    fn new(ctx: impl Into<String>, v: &'v Value, errs: &mut Vec<String>) -> Option<Self> {
        let ctx = ctx.into();
        match v.as_object() {
            Some(map) => Some(Self {
                ctx,
                map,
                seen: BTreeSet::new(),
            }),
            None => {
                errs.push(format!("{ctx}: expected an object"));
                None
            }
        }
    }

    fn path(&self, key: &str) -> String {
        if self.ctx.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.ctx)
        }
    }

    fn get(&mut self, key: &str) -> Option<&'v Value> {
        self.seen.insert(key.to_string());
        self.map.get(key)
    }

    fn f64(&mut self, key: &str, errs: &mut Vec<String>) -> Option<f64> {
        let v = self.get(key)?;
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                errs.push(format!("{}: expected a finite number, got {v}", self.path(key)));
                None
            }
        }
    }

    fn f64_or(&mut self, key: &str, default: f64, errs: &mut Vec<String>) -> f64 {
        self.f64(key, errs).unwrap_or(default)
    }

    fn uint(&mut self, key: &str, errs: &mut Vec<String>) -> Option<u64> {
        let v = self.get(key)?;
        match v.as_u64() {
            Some(x) => Some(x),
            None => {
                errs.push(format!("{}: expected a non-negative integer, got {v}", self.path(key)));
                None
            }
        }
    }

    fn usize_or(&mut self, key: &str, default: usize, errs: &mut Vec<String>) -> usize {
        self.uint(key, errs).map(|x| x as usize).unwrap_or(default)
    }

    /// A number or an array of numbers.
    fn f64_list_or(&mut self, key: &str, default: &[f64], errs: &mut Vec<String>) -> Vec<f64> {
        let Some(v) = self.get(key) else {
            return default.to_vec();
        };
        let items: Vec<&Value> = match v {
            Value::Array(a) => a.iter().collect(),
            other => vec![other],
        };
        let mut out = Vec::new();
        for item in items {
            match item.as_f64() {
                Some(x) if x.is_finite() => out.push(x),
                _ => {
                    errs.push(format!("{}: expected finite numbers, got {item}", self.path(key)));
                    return default.to_vec();
                }
            }
        }
        if out.is_empty() {
            errs.push(format!("{}: list must not be empty", self.path(key)));
            return default.to_vec();
        }
        out
    }

    fn uint_list_or(&mut self, key: &str, default: &[u64], errs: &mut Vec<String>) -> Vec<u64> {
        let Some(v) = self.get(key) else {
            return default.to_vec();
        };
        let items: Vec<&Value> = match v {
            Value::Array(a) => a.iter().collect(),
            other => vec![other],
        };
        let mut out = Vec::new();
        for item in items {
            match item.as_u64() {
                Some(x) => out.push(x),
                None => {
                    errs.push(format!("{}: expected non-negative integers, got {item}", self.path(key)));
                    return default.to_vec();
                }
            }
        }
        if out.is_empty() {
            errs.push(format!("{}: list must not be empty", self.path(key)));
            return default.to_vec();
        }
        out
    }

    fn string(&mut self, key: &str, errs: &mut Vec<String>) -> Option<&'v str> {
        let v = self.get(key)?;
        match v.as_str() {
            Some(s) => Some(s),
            None => {
                errs.push(format!("{}: expected a string, got {v}", self.path(key)));
                None
            }
        }
    }

    fn bool_or(&mut self, key: &str, default: bool, errs: &mut Vec<String>) -> bool {
        let Some(v) = self.get(key) else {
            return default;
        };
        match v.as_bool() {
            Some(b) => b,
            None => {
                errs.push(format!("{}: expected true or false, got {v}", self.path(key)));
                default
            }
        }
    }

    fn pair_or(&mut self, key: &str, default: (f64, f64), errs: &mut Vec<String>) -> (f64, f64) {
        let path = self.path(key);
        let v = self.f64_list_or(key, &[default.0, default.1], errs);
        if v.len() != 2 || !(v[0] < v[1]) {
            errs.push(format!("{path}: expected [lo, hi] with lo < hi"));
            return default;
        }
        (v[0], v[1])
    }

    fn finish(self, errs: &mut Vec<String>) {
        for key in self.map.keys() {
            if !self.seen.contains(key) {
                errs.push(format!("{}: unknown key", self.path(key)));
            }
        }
    }
}

fn require(errs: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        errs.push(msg());
    }
}

fn parse_coeffs(v: &Value, errs: &mut Vec<String>) -> Option<CoeffSpec> {
    let mut o = Obj::new("operatorSpec.coeffs", v, errs)?;
    let kind = o.string("kind", errs);
    let spec = match kind {
        Some("flat") => {
            let a = o.f64_or("a", 0.0, errs);
            let b = o.f64_or("b", std::f64::consts::PI, errs);
            require(errs, a < b, || format!("operatorSpec.coeffs: a < b required, got a = {a}, b = {b}"));
            Some(CoeffSpec::Flat { a, b })
        }
        Some("jacobi") => {
            let alpha = o.f64_or("alpha", 1.0, errs);
            let beta = o.f64_or("beta", 1.0, errs);
            require(errs, alpha > -1.0 && beta > -1.0, || {
                format!("operatorSpec.coeffs: alpha > -1 and beta > -1 required, got {alpha}, {beta}")
            });
            Some(CoeffSpec::Jacobi { alpha, beta })
        }
        Some("laguerre") => {
            let alpha = o.f64_or("alpha", 0.0, errs);
            let length = o.f64_or("length", 40.0, errs);
            require(errs, alpha > -1.0, || format!("operatorSpec.coeffs.alpha: alpha > -1 required, got {alpha}"));
            require(errs, length > 0.0, || format!("operatorSpec.coeffs.length: must be positive, got {length}"));
            Some(CoeffSpec::Laguerre { alpha, length })
        }
        Some("tabulated") => o.string("path", errs).map(|p| CoeffSpec::Tabulated { path: p.into() }).or_else(|| {
            errs.push("operatorSpec.coeffs.path: required for tabulated coefficients".into());
            None
        }),
        Some(other) => {
            errs.push(format!(
                "operatorSpec.coeffs.kind: unknown {other:?} (expected flat, jacobi, laguerre, tabulated)"
            ));
            None
        }
        None => {
            errs.push("operatorSpec.coeffs.kind: required".into());
            None
        }
    };
    o.finish(errs);
    spec
}

fn parse_operator(v: &Value, errs: &mut Vec<String>) -> Option<OperatorSpec> {
    let mut o = Obj::new("operatorSpec", v, errs)?;
    let spec = match o.string("kind", errs) {
        Some("diag-growth") => {
            let p = o.f64_or("p", 1.0, errs);
            let q = o.f64_or("q", -1.0, errs);
            let n = o.usize_or("N", 200, errs);
            require(errs, p > 0.0, || format!("operatorSpec.p: p > 0 required, got {p}"));
            require(errs, (1..=100_000).contains(&n), || format!("operatorSpec.N: must be in 1..=100000, got {n}"));
            Some(OperatorSpec::DiagGrowth { p, q, n })
        }
        Some("matrix-file") => match o.string("path", errs) {
            Some(p) => Some(OperatorSpec::MatrixFile { path: p.into() }),
            None => {
                errs.push("operatorSpec.path: required for matrix-file".into());
                None
            }
        },
        Some("sl") => {
            let coeffs = match o.get("coeffs") {
                Some(c) => parse_coeffs(c, errs),
                None => {
                    errs.push("operatorSpec.coeffs: required for sl".into());
                    None
                }
            };
            let n = o.usize_or("N", 100, errs);
            require(errs, (3..=2000).contains(&n), || format!("operatorSpec.N: must be in 3..=2000, got {n}"));
            let bc = match o.string("bc", errs) {
                None => None,
                Some("dirichlet") => Some(BoundaryCondition::Dirichlet),
                Some("neumann-type") => Some(BoundaryCondition::Natural),
                Some(other) => {
                    errs.push(format!("operatorSpec.bc: unknown {other:?} (expected dirichlet or neumann-type)"));
                    None
                }
            };
            let delta = o.f64("delta", errs);
            if let Some(d) = delta {
                require(errs, d > 0.0, || format!("operatorSpec.delta: must be positive, got {d}"));
            }
            coeffs.map(|coeffs| OperatorSpec::Sl { coeffs, n, bc, delta })
        }
        Some("laguerre") => {
            let alpha = o.f64_or("alpha", 1.0, errs);
            let k = o.f64_or("k", 1.0, errs);
            let n = o.usize_or("N", 8, errs);
            require(errs, alpha > -1.0, || format!("operatorSpec.alpha: alpha > -1 required, got {alpha}"));
            require(errs, k > 0.0, || format!("operatorSpec.k: k > 0 required, got {k}"));
            require(errs, n <= 80, || format!("operatorSpec.N: must be at most 80, got {n}"));
            Some(OperatorSpec::Laguerre { alpha, k, n })
        }
        Some(other) => {
            errs.push(format!(
                "operatorSpec.kind: unknown {other:?} (expected diag-growth, matrix-file, sl, laguerre)"
            ));
            None
        }
        None => {
            errs.push("operatorSpec.kind: required".into());
            None
        }
    };
    o.finish(errs);
    spec
}

fn check_range<T: PartialOrd + std::fmt::Display + Copy>(errs: &mut Vec<String>, key: &str, v: T, lo: T, hi: T) {
    require(errs, lo <= v && v <= hi, || format!("params.{key}: must be in {lo}..={hi}, got {v}"));
}

fn parse_params(exp: Experiment, v: Option<&Value>, op: Option<&OperatorSpec>, errs: &mut Vec<String>) -> Params {
    let empty = Value::Object(Map::new());
    let v = v.unwrap_or(&empty);
    let Some(mut o) = Obj::new("params", v, errs) else {
        return default_params(exp, op);
    };
    let params = match exp {
        Experiment::LeftdefVerify => {
            let r = o.f64_list_or("r", &[1.0, 2.0, 3.0], errs);
            for &x in &r {
                require(errs, x > 0.0, || format!("params.r: r > 0 required, got {x}"));
            }
            let samples = o.usize_or("samples", 200, errs);
            let form_samples = o.usize_or("formSamples", 1000, errs);
            let dim = o.usize_or("dim", 20, errs);
            let trials = o.usize_or("trials", 5, errs);
            check_range(errs, "samples", samples, 1, 100_000);
            check_range(errs, "formSamples", form_samples, 1, 100_000);
            check_range(errs, "dim", dim, 1, 200);
            check_range(errs, "trials", trials, 1, 1000);
            let spectrum = o.pair_or("spectrum", (1.0, 10.0), errs);
            require(errs, spectrum.0 > 0.0, || format!("params.spectrum: lower end must be positive, got {}", spectrum.0));
            let gamma = o.f64("gamma", errs);
            let degenerate = o.bool_or("degenerate", true, errs);
            Params::LeftdefVerify {
                r,
                samples,
                form_samples,
                dim,
                trials,
                spectrum,
                gamma,
                degenerate,
            }
        }
        Experiment::LaguerreIdentity => {
            let (da, dk, dd) = match op {
                Some(OperatorSpec::Laguerre { alpha, k, n }) => (*alpha, *k, *n),
                _ => (1.0, 1.0, 6),
            };
            let alpha = o.f64_list_or("alpha", &[da], errs);
            for &a in &alpha {
                require(errs, a > -1.0, || format!("params.alpha: alpha > -1 required, got {a}"));
            }
            let k = o.f64_or("k", dk, errs);
            require(errs, k > 0.0, || format!("params.k: k > 0 required, got {k}"));
            let n: Vec<u32> = o.uint_list_or("n", &[2], errs).into_iter().map(|x| x as u32).collect();
            for &x in &n {
                check_range(errs, "n", x, 1, 12);
            }
            let degree = o.usize_or("degree", dd, errs);
            check_range(errs, "degree", degree, 0, 60);
            Params::LaguerreIdentity { alpha, k, n, degree }
        }
        Experiment::Scale => {
            let (dp, dq, dn) = match op {
                Some(OperatorSpec::DiagGrowth { p, q, n }) => (*p, *q, *n),
                _ => (1.0, -1.0, 200),
            };
            let p = o.f64_or("p", dp, errs);
            let q = o.f64_or("q", dq, errs);
            let n = o.usize_or("N", dn, errs);
            require(errs, p > 0.0, || format!("params.p: p > 0 required, got {p}"));
            check_range(errs, "N", n, 1, 100_000);
            let s = o.f64_list_or("s", &[-2.0, -1.0, 0.0, 1.0, 2.0], errs);
            let t = o.f64_list_or("t", &[-1.0, 0.5, 2.0], errs);
            let samples = o.usize_or("samples", 20, errs);
            check_range(errs, "samples", samples, 1, 10_000);
            let grid_p = o.f64_list_or("gridP", &[0.5, 1.0, 2.0], errs);
            for &x in &grid_p {
                require(errs, x > 0.0, || format!("params.gridP: p > 0 required, got {x}"));
            }
            let grid_q = o.f64_list_or("gridQ", &[-1.5, -1.0, -0.5, 0.0], errs);
            let default_s: Vec<f64> = (-6..=6).map(|i| i as f64 * 0.5).collect();
            let grid_s = o.f64_list_or("gridS", &default_s, errs);
            let exclusion = o.f64_or("exclusion", 0.05, errs);
            require(errs, exclusion >= 0.0, || format!("params.exclusion: must be nonnegative, got {exclusion}"));
            let terms = o.usize_or("terms", 1_000_000, errs);
            check_range(errs, "terms", terms, 10, 10_000_000);
            Params::Scale {
                p,
                q,
                n,
                s,
                t,
                samples,
                grid_p,
                grid_q,
                grid_s,
                exclusion,
                terms,
            }
        }
        Experiment::Extensions => {
            let dims: Vec<usize> = o.uint_list_or("dims", &[5, 6, 7, 8, 9, 10], errs).into_iter().map(|x| x as usize).collect();
            let codims: Vec<usize> = o.uint_list_or("codims", &[1, 2, 3], errs).into_iter().map(|x| x as usize).collect();
            let trials = o.usize_or("trials", 100, errs);
            check_range(errs, "trials", trials, 1, 10_000);
            for &d in &dims {
                check_range(errs, "dims", d, 1, 100);
            }
            let min_dim = dims.iter().copied().min().unwrap_or(1);
            if op.is_none() {
                for &c in &codims {
                    require(errs, c < min_dim, || format!("params.codims: codim {c} must be below every dim (min {min_dim})"));
                }
            }
            let spectrum = o.pair_or("spectrum", (0.5, 10.0), errs);
            require(errs, spectrum.0 >= 0.0, || format!("params.spectrum: lower end must be nonnegative, got {}", spectrum.0));
            Params::Extensions {
                dims,
                codims,
                trials,
                spectrum,
            }
        }
        Experiment::FriedrichsConjecture => {
            let dim = o.usize_or("dim", 6, errs);
            check_range(errs, "dim", dim, 1, 60);
            let codims: Vec<usize> = o.uint_list_or("codims", &[1, 2], errs).into_iter().map(|x| x as usize).collect();
            for &c in &codims {
                require(errs, c < dim || op.is_some(), || format!("params.codims: codim {c} must be below dim {dim}"));
            }
            let powers: Vec<u32> = o.uint_list_or("powers", &[2, 3], errs).into_iter().map(|x| x as u32).collect();
            for &n in &powers {
                check_range(errs, "powers", n, 1, 4);
            }
            let trials = o.usize_or("trials", 100, errs);
            check_range(errs, "trials", trials, 1, 10_000);
            let spectrum = o.pair_or("spectrum", (0.5, 10.0), errs);
            require(errs, spectrum.0 >= 0.0, || format!("params.spectrum: lower end must be nonnegative, got {}", spectrum.0));
            Params::FriedrichsConjecture {
                dim,
                codims,
                powers,
                trials,
                spectrum,
            }
        }
        Experiment::PerturbSweep => {
            let dim = o.usize_or("dim", 8, errs);
            check_range(errs, "dim", dim, 2, 400);
            let rank = o.usize_or("rank", 1, errs);
            let max_rank = if matches!(op, Some(OperatorSpec::Sl { .. })) { 2 } else { dim - 1 };
            check_range(errs, "rank", rank, 1, max_rank.max(1));
            let default_t: Vec<f64> = (0..=10).map(f64::from).collect();
            let t = o.f64_list_or("t", &default_t, errs);
            require(errs, t.windows(2).all(|w| w[0] <= w[1]), || "params.t: values must be nondecreasing".into());
            let trials = o.usize_or("trials", 1, errs);
            check_range(errs, "trials", trials, 1, 10_000);
            let limit_t = o.f64_or("limitT", 1e8, errs);
            require(errs, limit_t > 0.0, || format!("params.limitT: must be positive, got {limit_t}"));
            let lambda = o.f64_or("lambda", 0.0, errs);
            let spectrum = o.pair_or("spectrum", (1.0, 10.0), errs);
            Params::PerturbSweep {
                dim,
                rank,
                t,
                trials,
                limit_t,
                lambda,
                spectrum,
            }
        }
    };
    o.finish(errs);
    params
}

fn default_params(exp: Experiment, op: Option<&OperatorSpec>) -> Params {
    let mut scratch = Vec::new();
    parse_params(exp, None, op, &mut scratch)
}

/// Parses and validates a JSON config, collecting every error found.
/// A missing `seed` defaults to 0.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Config(vec![format!("invalid JSON: {e}")]))?;
    let mut errs = Vec::new();
    let Some(mut o) = Obj::new("", &root, &mut errs) else {
        return Err(Error::Config(vec!["config: expected a JSON object".into()]));
    };
    let operator = o.get("operatorSpec").and_then(|v| parse_operator(v, &mut errs));
    let experiment = match o.string("experiment", &mut errs) {
        Some(name) => Experiment::from_name(name).or_else(|| {
            let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
            errs.push(format!("experiment: unknown {name:?} (expected one of {})", names.join(", ")));
            None
        }),
        None => {
            if !o.map.contains_key("experiment") {
                errs.push("experiment: required".into());
            }
            None
        }
    };
    let (seed, seed_source) = match o.uint("seed", &mut errs) {
        Some(s) => (s, SeedSource::Config),
        None => (0, SeedSource::Default),
    };
    let params_value = o.get("params");
    let tol_value = o.get("tolerances");
    o.finish(&mut errs);

    let Some(experiment) = experiment else {
        return Err(Error::Config(errs));
    };
    let params = parse_params(experiment, params_value, operator.as_ref(), &mut errs);
    if experiment == Experiment::LaguerreIdentity && operator.as_ref().is_some_and(|op| !matches!(op, OperatorSpec::Laguerre { .. })) {
        errs.push("operatorSpec: laguerre-identity accepts only a laguerre operatorSpec".into());
    }

    let mut tolerances = BTreeMap::new();
    if let Some(tv) = tol_value {
        if let Some(mut t) = Obj::new("tolerances", tv, &mut errs) {
            for (key, _) in experiment.tolerance_defaults() {
                if let Some(x) = t.f64(key, &mut errs) {
                    if x > 0.0 {
                        tolerances.insert(key.to_string(), x);
                    } else {
                        errs.push(format!("tolerances.{key}: must be positive, got {x}"));
                    }
                }
            }
            t.finish(&mut errs);
        }
    }
    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }
    Ok(ScenarioConfig {
        operator,
        experiment,
        params,
        seed,
        seed_source,
        tolerances,
    })
}

/// Reads a config file; relative paths inside resolve against its directory.
pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(parse_config(&text)?.resolve_paths(base))
}

/// A materialized operator; Sturm-Liouville specs keep their grid.
struct Built {
    op: SpectralOperator,
    sl: Option<(SLCoefficients, DiscreteOperator)>,
}

fn build_coeffs(spec: &CoeffSpec) -> Result<SLCoefficients> {
    match spec {
        CoeffSpec::Flat { a, b } => SLCoefficients::flat(*a, *b),
        CoeffSpec::Jacobi { alpha, beta } => SLCoefficients::jacobi(*alpha, *beta),
        CoeffSpec::Laguerre { alpha, length } => SLCoefficients::laguerre(*alpha, *length),
        CoeffSpec::Tabulated { path } => {
            let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Csv(format!("{}: {e}", path.display())))?;
            let mut rows = Vec::new();
            for rec in reader.records() {
                let rec = rec?;
                let vals: Vec<f64> = rec
                    .iter()
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Csv(format!("{}: {e}", path.display())))?;
                if vals.len() != 4 {
                    return Err(Error::Csv(format!("{}: expected columns x,p,q,w", path.display())));
                }
                rows.push([vals[0], vals[1], vals[2], vals[3]]);
            }
            SLCoefficients::tabulated(&rows)
        }
    }
}

fn build_operator(spec: &OperatorSpec) -> Result<Built> {
    let plain = |op| Built { op, sl: None };
    match spec {
        OperatorSpec::DiagGrowth { p, q, n } => GrowthModel::new(*p, *q)?.operator(*n).map(plain),
        OperatorSpec::MatrixFile { path } => {
            let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
            let m = read_matrix_csv(file)?;
            SpectralOperator::new(HermitianMatrix::new(m)?).map(plain)
        }
        OperatorSpec::Sl { coeffs, n, bc, delta } => {
            let mut co = build_coeffs(coeffs)?;
            if let Some(d) = delta {
                co = co.truncate_limit_circle(*d)?;
            }
            let dop = match bc {
                Some(bc) => sl::build_a0(&co, *n, *bc)?,
                None => sl::discretize(&co, *n)?,
            };
            let op = SpectralOperator::new(dop.matrix())?;
            Ok(Built { op, sl: Some((co, dop)) })
        }
        OperatorSpec::Laguerre { k, n, .. } => {
            let d: Vec<f64> = (0..=*n).map(|m| m as f64 + k).collect();
            SpectralOperator::diagonal(&d).map(plain)
        }
    }
}

/// Resets thresholds of the named rows and re-evaluates their status.
fn retune(report: &mut Report, names: &[&str], tol: f64) {
    for row in report.rows.iter_mut().filter(|r| names.contains(&r.name.as_str())) {
        if row.residual.is_nan() {
            continue;
        }
        *row = CheckRow::bounded(std::mem::take(&mut row.name), std::mem::take(&mut row.inputs), row.residual, tol);
    }
}

/// Appends `other`'s tables into `into`, prefixing rows with `lead` cells.
fn merge_tables(into: &mut BTreeMap<String, Table>, lead_header: &[&str], lead: &[String], other: Vec<Table>) {
    for t in other {
        let entry = into.entry(t.name.clone()).or_insert_with(|| {
            let mut header: Vec<String> = lead_header.iter().map(|s| s.to_string()).collect();
            header.extend(t.header.iter().cloned());
            Table {
                name: t.name.clone(),
                header,
                rows: Vec::new(),
            }
        });
        for r in t.rows {
            let mut row = lead.to_vec();
            row.extend(r);
            entry.rows.push(row);
        }
    }
}

/// A count of failing cases as a check row with threshold 0.
fn count_row(name: &str, inputs: String, failures: usize) -> CheckRow {
    CheckRow::bounded(name, inputs, failures as f64, 0.0)
}

/// Runs a validated scenario. Module errors become FAIL rows.
pub fn run_scenario(config: &ScenarioConfig) -> Report {
    let mut report = Report::new(format!("ldlab scenario: {}", config.experiment.name()));
    let source = match config.seed_source {
        SeedSource::Default => "default",
        SeedSource::Config => "config",
        SeedSource::Env => SEED_ENV,
    };
    report.notes.push(format!("seed = {} ({source})", config.seed));
    report.notes.push("rng = ChaCha8, per-trial seeds derived from (seed, trial index)".into());
    let built = match config.operator.as_ref().map(build_operator).transpose() {
        Ok(b) => b,
        Err(e) => {
            report.push(CheckRow::error("operator", e));
            return report;
        }
    };
    if let Some(b) = &built {
        report.notes.push(format!("operator dim = {}, lower bound = {}", b.op.dim(), num(b.op.lower_bound())));
        if let Some((co, _)) = &b.sl {
            if co.truncated {
                report.notes.push("limit-circle endpoints truncated; results approximate the truncated domain".into());
            }
        }
    }
    let body = match config.experiment {
        Experiment::LeftdefVerify => run_leftdef(config, built.as_ref()),
        Experiment::LaguerreIdentity => run_laguerre(config),
        Experiment::Scale => run_scale(config, built.as_ref()),
        Experiment::Extensions => run_extensions(config, built.as_ref()),
        Experiment::FriedrichsConjecture => run_friedrichs(config, built.as_ref()),
        Experiment::PerturbSweep => run_perturb(config, built.as_ref()),
    };
    report.extend(body);
    report
}

fn run_leftdef(config: &ScenarioConfig, built: Option<&Built>) -> Report {
    let Params::LeftdefVerify {
        r,
        samples,
        form_samples,
        dim,
        trials,
        spectrum,
        gamma,
        degenerate,
    } = &config.params
    else {
        unreachable!("params match the experiment")
    };
    let mut report = Report::new("");
    let mut ops: Vec<(String, SpectralOperator)> = Vec::new();
    match built {
        Some(b) => ops.push(("operator".into(), b.op.clone())),
        None => {
            for t in 0..*trials {
                let mut g = rng::seeded(rng::trial_seed(config.seed, t as u64));
                let m = rng::positive_definite(&mut g, *dim, spectrum.0, spectrum.1);
                match SpectralOperator::new(m) {
                    Ok(op) => ops.push((format!("trial{t}"), op)),
                    Err(e) => report.push(CheckRow::error("operator", e)),
                }
            }
        }
    }
    if *degenerate {
        ops.push(("diag(2,2,5)".into(), SpectralOperator::diagonal(&[2.0, 2.0, 5.0]).expect("diagonal")));
    }
    let mut tables = BTreeMap::new();
    for (idx, (label, op)) in ops.into_iter().enumerate() {
        let op = match gamma {
            Some(g) => match op.with_shift(*g) {
                Ok(o) => o,
                Err(e) => {
                    report.push(CheckRow::error("shift", format!("{label}: {e}")));
                    continue;
                }
            },
            None => op,
        };
        let seed = rng::trial_seed(config.seed, 10_000 + idx as u64);
        for &rr in r {
            match leftdef::verify_ld_properties(&op, rr, *samples, seed) {
                Ok(mut sub) => {
                    for row in &mut sub.rows {
                        row.inputs = format!("{label}: {}", row.inputs);
                    }
                    merge_tables(&mut tables, &["operator", "r"], &[label.clone(), num(rr)], std::mem::take(&mut sub.tables));
                    report.extend(sub);
                }
                Err(e) => report.push(CheckRow::error("left-definite", format!("{label}, r={rr}: {e}"))),
            }
            if rr.fract() == 0.0 {
                match leftdef::verify_closed_form(&op, rr as u32, *form_samples, seed) {
                    Ok(mut sub) => {
                        for row in &mut sub.rows {
                            row.inputs = format!("{label}: {}", row.inputs);
                        }
                        report.extend(sub);
                    }
                    Err(e) => report.push(CheckRow::error("closed-form", format!("{label}, r={rr}: {e}"))),
                }
            }
        }
    }
    retune(&mut report, &["lower-bound", "duality", "power-semigroup", "eigen-gram"], config.tolerance("property"));
    retune(&mut report, &["closed-form-bound", "closed-form-real"], config.tolerance("form"));
    report.tables.extend(tables.into_values());
    report
}

fn run_laguerre(config: &ScenarioConfig) -> Report {
    let Params::LaguerreIdentity { alpha, k, n, degree } = &config.params else {
        unreachable!("params match the experiment")
    };
    let mut report = Report::new("");
    let tol = config.tolerance("identity");
    let mut combined: Option<Table> = None;
    for &a in alpha {
        for &nn in n {
            let inputs = format!("alpha={a}, k={k}, n={nn}, degree={degree}");
            match classical::laguerre_identity_check(a, *k, nn, *degree) {
                Ok(chk) => {
                    report.push(CheckRow::bounded("identity", inputs, chk.max_residual, tol));
                    match &mut combined {
                        Some(t) => t.rows.extend(chk.table.rows),
                        None => {
                            let mut t = chk.table;
                            t.name = "laguerre-identity".into();
                            combined = Some(t);
                        }
                    }
                }
                Err(e) => report.push(CheckRow::error("identity", format!("{inputs}: {e}"))),
            }
        }
    }

    // b_j spot values in exact integer arithmetic
    let mut bj = Table::new("bj", &["n", "k", "j", "b"]);
    let mut spot_ok = matches!(
        (bj_coeff_exact(2, 1, 0), bj_coeff_exact(2, 1, 1), bj_coeff_exact(2, 1, 2)),
        (Ok(1), Ok(3), Ok(1))
    );
    for nn in 1..=5u32 {
        for kk in 1..=3i64 {
            spot_ok &= bj_coeff_exact(nn, kk, 0).ok() == Some((kk as i128).pow(nn));
            spot_ok &= bj_coeff_exact(nn, kk, nn).ok() == Some(1);
        }
    }
    report.push(CheckRow::flag("bj-spot", "b(2,1) = (1,3,1); b_0(n,k) = k^n, b_n(n,k) = 1 for n <= 5", spot_ok));
    if k.fract() == 0.0 {
        for &nn in n {
            for j in 0..=nn {
                if let Ok(b) = bj_coeff_exact(nn, *k as i64, j) {
                    bj.push(vec![nn.to_string(), num(*k), j.to_string(), b.to_string()]);
                }
            }
        }
    } else {
        for &nn in n {
            for j in 0..=nn {
                if let Ok(b) = classical::bj_coeff(nn, *k, j) {
                    bj.push(vec![nn.to_string(), num(*k), j.to_string(), num(b)]);
                }
            }
        }
    }

    // α = 1, k = 1, n = 1, p = q = x gives 8 on both sides
    let hand = (|| -> Result<f64> {
        let basis = LaguerreBasis::new(1.0, 1)?;
        let spec = DirichletFormSpec::new(1, 1.0)?;
        let x = basis.monomial(1)?;
        let d = classical::dirichlet_inner(&spec, &basis, &x, &x)?;
        let s = classical::spectral_inner(&basis, 1.0, 1, &x, &x)?;
        Ok((d - 8.0).abs().max((s - 8.0).abs()))
    })();
    match hand {
        Ok(res) => report.push(CheckRow::bounded("hand-check", "alpha=1, k=1, n=1, p=q=x, expect 8", res, config.tolerance("hand"))),
        Err(e) => report.push(CheckRow::error("hand-check", e)),
    }
    report.tables.extend(combined);
    report.tables.push(bj);
    report
}

fn run_scale(config: &ScenarioConfig, built: Option<&Built>) -> Report {
    let Params::Scale {
        p,
        q,
        n,
        s,
        t,
        samples,
        grid_p,
        grid_q,
        grid_s,
        exclusion,
        terms,
    } = &config.params
    else {
        unreachable!("params match the experiment")
    };
    let mut report = Report::new("");
    let model = match GrowthModel::new(*p, *q) {
        Ok(m) => m,
        Err(e) => {
            report.push(CheckRow::error("model", e));
            return report;
        }
    };
    let op = match built {
        Some(b) => b.op.clone(),
        None => match model.operator(*n) {
            Ok(op) => op,
            Err(e) => {
                report.push(CheckRow::error("operator", e));
                return report;
            }
        },
    };
    let dim = op.dim();
    let mut g = rng::seeded(config.seed);
    let vectors: Vec<ScaleVector> = (0..*samples)
        .map(|_| ScaleVector::new(rng::complex_vector(&mut g, dim)))
        .chain([model.vector(dim)])
        .collect();

    let mut iso = 0.0f64;
    let mut dual = 0.0f64;
    let mut failure = None;
    for &ss in s {
        for (i, phi) in vectors.iter().enumerate() {
            for &tt in t {
                match hscale::isometry_check(&op, ss, tt, phi) {
                    Ok(r) => iso = iso.max(r),
                    Err(e) => failure = Some(e),
                }
            }
            let psi = &vectors[(i + 1) % vectors.len()];
            match hscale::duality_pair(&op, ss, phi, psi) {
                Ok(pair) => {
                    let plain = psi.coeffs.dotc(&phi.coeffs);
                    let scale = phi.coeffs.norm() * psi.coeffs.norm();
                    dual = dual.max((pair - plain).norm() / scale.max(f64::MIN_POSITIVE));
                }
                Err(e) => failure = Some(e),
            }
        }
    }
    let inputs = format!("dim={dim}, s={s:?}, t={t:?}, vectors={}", vectors.len());
    match failure {
        Some(e) => report.push(CheckRow::error("isometry", e)),
        None => {
            report.push(CheckRow::bounded("isometry", inputs.clone(), iso, config.tolerance("isometry")));
            report.push(CheckRow::bounded("duality", inputs, dual, config.tolerance("duality")));
        }
    }

    let spot = |pp: f64, qq: f64| GrowthModel::new(pp, qq).map(|m| hscale::critical_index(&m)).ok();
    let spots_ok = spot(1.0, -1.0) == Some(1.0) && spot(2.0, 0.0) == Some(-0.5);
    report.push(CheckRow::flag("critical-index", "s*(1,-1) = 1, s*(2,0) = -1/2", spots_ok));

    // classifier agreement on the grid, one partial-sum pass per exponent
    let mut table = Table::new("membership", &["p", "q", "s", "s*", "verdict", "partial-sum-verdict"]);
    let mut cache: BTreeMap<u64, bool> = BTreeMap::new();
    let (mut compared, mut mismatched) = (0usize, 0usize);
    for &pp in grid_p {
        for &qq in grid_q {
            let Ok(m) = GrowthModel::new(pp, qq) else { continue };
            let star = hscale::critical_index(&m);
            for &ss in grid_s {
                if (ss - star).abs() < *exclusion {
                    continue;
                }
                let e = m.series_exponent(ss);
                let ps = *cache.entry(e.to_bits()).or_insert_with(|| hscale::partial_sum_converges(e, *terms));
                let member = hscale::membership(&m, ss);
                compared += 1;
                mismatched += usize::from(member != ps);
                let word = |b: bool| if b { "member" } else { "non-member" };
                table.push(vec![num(pp), num(qq), num(ss), num(star), word(member).into(), word(ps).into()]);
            }
        }
    }
    report.push(count_row(
        "classifier-agreement",
        format!("{compared} grid points, |s - s*| >= {exclusion}, N = {terms}"),
        mismatched,
    ));
    report.tables.push(table);

    let mut eq = Table::new("equivalence", &["s", "ratio-min", "ratio-max"]);
    let mut eq_ok = true;
    for &ss in s {
        match hscale::equivalence_check(&op, ss, *samples, config.seed) {
            Ok(b) => {
                eq_ok &= b.min > 0.0 && b.max.is_finite();
                eq.push(vec![num(ss), num(b.min), num(b.max)]);
            }
            Err(e) => {
                report.push(CheckRow::error("norm-equivalence", e));
                eq_ok = false;
            }
        }
    }
    report.push(CheckRow::flag("norm-equivalence", format!("gamma={}", num(op.shift())), eq_ok));
    report.tables.push(eq);
    report
}

fn random_operator(g: &mut rng::Lab, dim: usize, spectrum: (f64, f64)) -> Result<SpectralOperator> {
    SpectralOperator::new(rng::positive_definite(g, dim, spectrum.0, spectrum.1))
}

fn pick<T: Copy>(g: &mut rng::Lab, xs: &[T]) -> T {
    xs[g.random_range(0..xs.len())]
}

fn run_extensions(config: &ScenarioConfig, built: Option<&Built>) -> Report {
    let Params::Extensions {
        dims,
        codims,
        trials,
        spectrum,
    } = &config.params
    else {
        unreachable!("params match the experiment")
    };
    let mut report = Report::new("");
    let mut rows: Vec<(u64, usize, usize, SweepRow)> = Vec::new();
    let (mut def_bad, mut vn_bad, mut sa_bad, mut ext_bad, mut dom_bad) = (0, 0, 0, 0, 0);
    for trial in 0..*trials {
        let ts = rng::trial_seed(config.seed, trial as u64);
        let mut g = rng::seeded(ts);
        let a = match built {
            Some(b) => Ok(b.op.clone()),
            None => {
                let dim = pick(&mut g, dims);
                random_operator(&mut g, dim, *spectrum)
            }
        };
        let codim = pick(&mut g, codims);
        let outcome = a.and_then(|a| {
            if codim > a.dim() {
                return Err(Error::Parameter(format!("codim {codim} exceeds dim {}", a.dim())));
            }
            let dim = a.dim();
            let c = rng::subspace(&mut g, dim, codim);
            let problem = extensions::ExtensionProblem::new(a, c)?;
            let s = &problem.s;
            let def = extensions::deficiency_indices(s)?;
            let mut verdict = Vec::new();
            if (def.m_plus, def.m_minus) != (codim, codim) {
                def_bad += 1;
                verdict.push("deficiency");
            }
            if !extensions::von_neumann_check(s).passed() {
                vn_bad += 1;
                verdict.push("von-neumann");
            }
            let sf = extensions::friedrichs_relation(s)?;
            if !sf.is_selfadjoint() {
                sa_bad += 1;
                verdict.push("self-adjoint");
            }
            if !s.is_subset_of(&sf) {
                ext_bad += 1;
                verdict.push("extends");
            }
            if !sf.domain().approx_eq(&s.domain()) {
                dom_bad += 1;
                verdict.push("domain");
            }
            let eig = sf.operator_spectrum()?;
            let verdict = if verdict.is_empty() { "ok".to_string() } else { format!("fail: {}", verdict.join(" ")) };
            Ok((dim, SweepRow {
                parameter: def.m_plus as f64,
                eigenvalues: eig,
                verdict,
            }))
        });
        match outcome {
            Ok((dim, row)) => rows.push((ts, dim, codim, row)),
            Err(e) => report.push(CheckRow::error("trial", format!("trial {trial}: {e}"))),
        }
    }
    let inputs = format!("{} trials, dims {dims:?}, codims {codims:?}", trials);
    report.push(count_row("deficiency-indices", format!("{inputs}: (m+, m-) = (d, d)"), def_bad));
    report.push(count_row("von-neumann", format!("{inputs}: dim S* = dim S + m+ + m-"), vn_bad));
    report.push(count_row("friedrichs-selfadjoint", inputs.clone(), sa_bad));
    report.push(count_row("friedrichs-extends", inputs.clone(), ext_bad));
    report.push(count_row("friedrichs-domain", format!("{inputs}: dom S_F = dom S"), dom_bad));
    report.tables.push(trial_table("extension-trials", "codim", "m-plus", &rows));
    report
}

/// `(trial-seed, dim, codim/rank, parameter, eigenvalues…, verdict)` for
/// rows with their own dim and codim.
fn trial_table(name: &str, third: &str, param: &str, rows: &[(u64, usize, usize, SweepRow)]) -> Table {
    let width = rows.iter().map(|r| r.3.eigenvalues.len()).max().unwrap_or(0);
    let mut header: Vec<String> = ["trial-seed", "dim", third, param].iter().map(|s| s.to_string()).collect();
    header.extend((1..=width).map(|i| format!("lambda{i}")));
    header.push("verdict".into());
    let mut t = Table {
        name: name.into(),
        header,
        rows: Vec::new(),
    };
    for (seed, dim, third, row) in rows {
        let mut cells = vec![seed.to_string(), dim.to_string(), third.to_string(), num(row.parameter)];
        cells.extend(row.eigenvalues.iter().map(|&l| num(l)));
        cells.extend(std::iter::repeat_n(String::new(), width - row.eigenvalues.len()));
        cells.push(row.verdict.clone());
        t.push(cells);
    }
    t
}

fn run_friedrichs(config: &ScenarioConfig, built: Option<&Built>) -> Report {
    let Params::FriedrichsConjecture {
        dim,
        codims,
        powers,
        trials,
        spectrum,
    } = &config.params
    else {
        unreachable!("params match the experiment")
    };
    let mut report = Report::new("");
    let combos: Vec<(usize, u32)> = codims.iter().flat_map(|&c| powers.iter().map(move |&n| (c, n))).collect();
    let mut table = Table::new(
        "friedrichs-trials",
        &["trial-seed", "dim", "codim", "parameter", "dim-dom-power-of-friedrichs", "dim-dom-friedrichs-of-power", "verdict"],
    );
    let (mut trivial_bad, mut nest_bad, mut equal, mut differ) = (0usize, 0usize, 0usize, 0usize);
    for trial in 0..*trials {
        let (codim, n) = combos[trial % combos.len()];
        let ts = rng::trial_seed(config.seed, trial as u64);
        let mut g = rng::seeded(ts);
        let outcome = (|| -> Result<(usize, extensions::PowerExperiment)> {
            let a = match built {
                Some(b) => b.op.clone(),
                None => random_operator(&mut g, *dim, *spectrum)?,
            };
            if codim > a.dim() {
                return Err(Error::Parameter(format!("codim {codim} exceeds dim {}", a.dim())));
            }
            let c = rng::subspace(&mut g, a.dim(), codim);
            let s = extensions::minimal_relation(&a, &c)?;
            Ok((a.dim(), extensions::friedrichs_power_experiment(&s, n)?))
        })();
        match outcome {
            Ok((d, exp)) => {
                if (codim == 0 || n == 1) && exp.verdict != Verdict::Equal {
                    trivial_bad += 1;
                }
                if !exp.friedrichs_power.contains_subspace(&exp.power_friedrichs) {
                    nest_bad += 1;
                }
                match exp.verdict {
                    Verdict::Equal => equal += 1,
                    Verdict::Differ => differ += 1,
                }
                table.push(vec![
                    ts.to_string(),
                    d.to_string(),
                    codim.to_string(),
                    n.to_string(),
                    exp.friedrichs_power.dim().to_string(),
                    exp.power_friedrichs.dim().to_string(),
                    exp.verdict.as_str().into(),
                ]);
            }
            Err(e) => report.push(CheckRow::error("trial", format!("trial {trial}: {e}"))),
        }
    }
    report.notes.push(format!("verdicts: {equal} EQUAL, {differ} DIFFER (reported, not asserted)"));
    let inputs = format!("{trials} trials, dim {dim}, codims {codims:?}, powers {powers:?}");
    report.push(count_row("trivial-cases-equal", format!("{inputs}: codim 0 or n = 1"), trivial_bad));
    report.push(count_row("domain-nesting", format!("{inputs}: dom((S^n)_F) in dom((S_F)^n)"), nest_bad));
    report.tables.push(table);
    report
}

fn normalized_columns(m: CMatrix) -> CMatrix {
    let mut m = m;
    for mut col in m.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= nalgebra::Complex::new(norm, 0.0);
        }
    }
    m
}

fn run_perturb(config: &ScenarioConfig, built: Option<&Built>) -> Report {
    let Params::PerturbSweep {
        dim,
        rank,
        t,
        trials,
        limit_t,
        lambda,
        spectrum,
    } = &config.params
    else {
        unreachable!("params match the experiment")
    };
    let mut report = Report::new("");
    let mut sweep_rows: Vec<(u64, usize, usize, SweepRow)> = Vec::new();
    let mut limit_rows: Vec<(u64, usize, usize, SweepRow)> = Vec::new();
    let (mut mono_bad, mut inter_bad, mut inter_total) = (0usize, 0usize, 0usize);
    let mut limit_res = 0.0f64;
    let mut matrix_res = 0.0f64;
    let mut grid_tables = Vec::new();
    let trials = if built.is_some() { 1 } else { *trials };

    for trial in 0..trials {
        let ts = rng::trial_seed(config.seed, trial as u64);
        let mut g = rng::seeded(ts);
        let setup = (|| -> Result<(SpectralOperator, CMatrix)> {
            match built {
                Some(Built { op, sl: Some((co, dop)) }) => {
                    let mut cols = vec![sl::boundary_functional(co, dop, *lambda, Endpoint::Left)?];
                    if *rank == 2 {
                        cols.push(sl::boundary_functional(co, dop, *lambda, Endpoint::Right)?);
                    }
                    if trial == 0 {
                        for bf in &cols {
                            let name = match bf.end {
                                Endpoint::Left => "principal-solution-left",
                                Endpoint::Right => "principal-solution-right",
                            };
                            grid_tables.push(sl::GridFunction { x: dop.nodes.clone(), values: bf.u.clone() }.to_table(name));
                        }
                    }
                    let columns: Vec<CVector> = cols.iter().map(|bf| bf.matrix_column(dop)).collect();
                    Ok((op.clone(), normalized_columns(CMatrix::from_columns(&columns))))
                }
                Some(Built { op, sl: None }) => {
                    let b = rng::complex_matrix(&mut g, op.dim(), *rank);
                    Ok((op.clone(), normalized_columns(b)))
                }
                None => {
                    let lambdas: Vec<f64> = (0..*dim).map(|_| g.random_range(spectrum.0..spectrum.1)).collect();
                    let a = SpectralOperator::new(rng::with_spectrum(&mut g, &lambdas))?;
                    let b = rng::complex_matrix(&mut g, *dim, *rank);
                    Ok((a, normalized_columns(b)))
                }
            }
        })();
        let (a0, b) = match setup {
            Ok(x) => x,
            Err(e) => {
                report.push(CheckRow::error("setup", format!("trial {trial}: {e}")));
                continue;
            }
        };
        let n = a0.dim();
        let outcome = (|| -> Result<()> {
            let family = if *rank == 1 {
                ThetaFamily::RankOne(t.iter().copied().chain([f64::INFINITY]).collect())
            } else {
                ThetaFamily::Matrices(
                    t.iter()
                        .map(|&x| (x, HermitianMatrix::from_diagonal(&vec![x; *rank])))
                        .collect(),
                )
            };
            let sweep = extensions::theta_sweep(&a0, &b, &family)?;
            if sweep.monotone != Some(true) {
                mono_bad += 1;
            }
            for row in sweep.rows {
                sweep_rows.push((ts, n, *rank, row));
            }
            if *rank == 1 {
                let phi = b.column(0).clone_owned();
                for &x in t.iter().filter(|&&x| x > 0.0) {
                    inter_total += 1;
                    if !extensions::interlacing_check(&a0, &phi, x)? {
                        inter_bad += 1;
                    }
                }
            }

            let inf = PerturbationSpec::new(b.clone(), LinearRelation::purely_multivalued(*rank))?;
            let ladder: Vec<f64> = [1e2, 1e4, 1e6].into_iter().filter(|&x| x < *limit_t).chain([*limit_t]).collect();
            let lc = extensions::limit_crosscheck(&a0, &inf, &ladder, config.tolerance("limit"))?;
            limit_res = limit_res.max(lc.final_residual / a0.matrix().max_norm().max(1.0));
            for row in lc.rows {
                limit_rows.push((ts, n, *rank, row));
            }

            // relation path against a direct eigensolve of the matrix sum
            let top = t.iter().copied().fold(0.0, f64::max);
            let theta = HermitianMatrix::from_diagonal(&vec![top; *rank]);
            let spec = PerturbationSpec::from_matrix(b.clone(), &theta)?;
            let via_relation = extensions::perturb(&a0, &spec)?.operator_spectrum()?;
            let direct = a0.matrix().entries() + &b * theta.entries() * b.adjoint();
            let direct = eigh(&HermitianMatrix::new((&direct + direct.adjoint()).scale(0.5))?)?.eigenvalues;
            let scale = a0.matrix().max_norm().max(top).max(1.0);
            let res = via_relation
                .iter()
                .zip(&direct)
                .map(|(x, y)| (x - y).abs() / scale)
                .fold(0.0, f64::max);
            matrix_res = matrix_res.max(res);
            Ok(())
        })();
        if let Err(e) = outcome {
            report.push(CheckRow::error("trial", format!("trial {trial}: {e}")));
        }
    }
    let inputs = format!("{trials} trials, rank {rank}, t {t:?}");
    report.push(count_row("monotone", inputs.clone(), mono_bad));
    if *rank == 1 {
        report.push(count_row("interlacing", format!("{inter_total} (trial, t) pairs"), inter_bad));
    }
    report.push(CheckRow::bounded("limit-crosscheck", format!("t = {}, relative to max(1, max|A0|)", num(*limit_t)), limit_res, config.tolerance("limit")));
    report.push(CheckRow::bounded("matrix-path", inputs, matrix_res, config.tolerance("matrix")));
    report.tables.push(trial_table("sweep", "rank", "parameter", &sweep_rows));
    report.tables.push(trial_table("limit", "rank", "parameter", &limit_rows));
    report.tables.extend(grid_tables);
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect()
}

/// Writes `report.txt`; with [`OutputFormat::Csv`] also `tables/checks.csv`
/// and one CSV per table. Returns the written paths.
pub fn emit(report: &Report, format: OutputFormat, out: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut written = Vec::new();
    let txt = out.join("report.txt");
    fs::write(&txt, report.to_text()).map_err(|e| Error::io(&txt, e))?;
    written.push(txt);
    if format == OutputFormat::Csv {
        let dir = out.join("tables");
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for table in std::iter::once(report.rows_table()).chain(report.tables.iter().cloned()) {
            let path = dir.join(format!("{}.csv", file_stem(&table.name)));
            let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            table.write_csv(std::io::BufWriter::new(file))?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ScenarioConfig {
        parse_config(text).unwrap()
    }

    fn errors(text: &str) -> Vec<String> {
        match parse_config(text) {
            Err(Error::Config(e)) => e,
            other => panic!("expected config errors, got {other:?}"),
        }
    }

    #[test]
    fn laguerre_config_valid() {
        let c = cfg(r#"{"experiment":"laguerre-identity","params":{"alpha":1,"k":1,"n":2,"degree":6}}"#);
        assert_eq!(c.seed, 0);
        assert_eq!(c.seed_source, SeedSource::Default);
        assert_eq!(
            c.params,
            Params::LaguerreIdentity {
                alpha: vec![1.0],
                k: 1.0,
                n: vec![2],
                degree: 6
            }
        );
    }

    #[test]
    fn alpha_constraint_named() {
        let e = errors(r#"{"experiment":"laguerre-identity","params":{"alpha":-2}}"#);
        assert!(e.iter().any(|m| m.contains("alpha > -1")), "{e:?}");
    }

    #[test]
    fn all_errors_collected() {
        let e = errors(
            r#"{"experiment":"laguerre-identity","bogus":1,"params":{"alpha":-2,"k":0,"extra":true},"tolerances":{"nope":1}}"#,
        );
        assert!(e.iter().any(|m| m == "bogus: unknown key"));
        assert!(e.iter().any(|m| m.contains("alpha > -1")));
        assert!(e.iter().any(|m| m.contains("k > 0")));
        assert!(e.iter().any(|m| m == "params.extra: unknown key"));
        assert!(e.iter().any(|m| m == "tolerances.nope: unknown key"));
    }

    #[test]
    fn type_mismatch_and_unknown_experiment() {
        let e = errors(r#"{"experiment":"scale","seed":"x","params":{"p":"one"}}"#);
        assert!(e.iter().any(|m| m.starts_with("seed:")));
        assert!(e.iter().any(|m| m.starts_with("params.p:")));
        let e = errors(r#"{"experiment":"nope"}"#);
        assert!(e[0].contains("unknown \"nope\""));
        let e = errors(r#"{}"#);
        assert_eq!(e, vec!["experiment: required".to_string()]);
        assert!(matches!(parse_config("not json"), Err(Error::Config(_))));
    }

    #[test]
    fn operator_specs_parse() {
        let c = cfg(r#"{"experiment":"scale","operatorSpec":{"kind":"diag-growth","p":2,"q":0,"N":10}}"#);
        assert_eq!(c.operator, Some(OperatorSpec::DiagGrowth { p: 2.0, q: 0.0, n: 10 }));
        let c = cfg(
            r#"{"experiment":"perturb-sweep","operatorSpec":{"kind":"sl","coeffs":{"kind":"flat","a":0,"b":1},"N":50,"bc":"neumann-type"}}"#,
        );
        assert!(matches!(c.operator, Some(OperatorSpec::Sl { bc: Some(BoundaryCondition::Natural), .. })));
        let e = errors(r#"{"experiment":"scale","operatorSpec":{"kind":"sl","coeffs":{"kind":"weird"},"N":1}}"#);
        assert_eq!(e.len(), 2, "{e:?}");
    }

    #[test]
    fn seed_override() {
        let c = cfg(r#"{"experiment":"scale","seed":3}"#);
        assert_eq!(c.seed_source, SeedSource::Config);
        let c = c.with_seed_override(Some("11")).unwrap();
        assert_eq!((c.seed, c.seed_source), (11, SeedSource::Env));
        assert!(c.with_seed_override(Some("-1")).is_err());
    }

    #[test]
    fn laguerre_scenario_passes() {
        let c = cfg(r#"{"experiment":"laguerre-identity","params":{"alpha":1,"k":1,"n":2,"degree":6}}"#);
        let r = run_scenario(&c);
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.row("identity").unwrap().residual <= 1e-8);
        assert!(r.to_text().trim_end().ends_with("PASS"));
        assert!(r.notes[0].contains("seed = 0 (default)"));
    }

    #[test]
    fn friedrichs_codim_zero_equal() {
        let c = cfg(r#"{"experiment":"friedrichs-conjecture","params":{"dim":6,"codims":0,"powers":2,"trials":3}}"#);
        let r = run_scenario(&c);
        assert!(r.passed(), "{}", r.to_text());
        let t = r.table("friedrichs-trials").unwrap();
        assert!(t.rows.iter().all(|row| row.last().unwrap() == "EQUAL"));
    }

    #[test]
    fn perturb_sweep_monotone() {
        let c = cfg(r#"{"experiment":"perturb-sweep","params":{"rank":1,"trials":3}}"#);
        let r = run_scenario(&c);
        assert!(r.passed(), "{}", r.to_text());
        let c = cfg(r#"{"experiment":"perturb-sweep","params":{"rank":2,"trials":2,"dim":6}}"#);
        assert!(run_scenario(&c).passed());
    }

    #[test]
    fn module_errors_become_fail_rows() {
        let c = cfg(r#"{"experiment":"leftdef-verify","operatorSpec":{"kind":"matrix-file","path":"/nonexistent/a.csv"}}"#);
        let r = run_scenario(&c);
        assert!(!r.passed());
        assert_eq!(r.rows[0].name, "operator");
        let c = cfg(r#"{"experiment":"leftdef-verify","params":{"trials":1,"gamma":50,"degenerate":false}}"#);
        assert!(!run_scenario(&c).passed());
    }

    #[test]
    fn emit_is_byte_stable() {
        let c = cfg(r#"{"experiment":"extensions","params":{"trials":5},"seed":4}"#);
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        let pa = emit(&run_scenario(&c), OutputFormat::Csv, &a).unwrap();
        let pb = emit(&run_scenario(&c), OutputFormat::Csv, &b).unwrap();
        assert_eq!(pa.len(), pb.len());
        for (x, y) in pa.iter().zip(&pb) {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
        }
        assert!(a.join("tables/checks.csv").exists());
        let only_text = emit(&run_scenario(&c), OutputFormat::Text, &dir.path().join("c")).unwrap();
        assert_eq!(only_text.len(), 1);
    }
}
