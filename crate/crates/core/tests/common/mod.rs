//! Brute-force oracles shared by the integration tests. They work in the
//! real embedding `z ↦ (Re z, Im z)` and never touch
//! the crate's relation machinery. Ranks and null spaces come from
//! row reduction, not from an SVD.
#![allow(dead_code)]

use ldlab::linalg::CMatrix;
use nalgebra::DMatrix;

pub const ORACLE_TOL: f64 = 1e-9;

/// `[[Re, −Im], [Im, Re]]`.
pub fn real_embed(m: &CMatrix) -> DMatrix<f64> {
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Reduced row echelon form with partial pivoting; returns the pivot
/// columns. Entries below `ORACLE_TOL·max|m|` count as zero.
fn rref(m: &mut DMatrix<f64>) -> Vec<usize> {
    let (rows, cols) = m.shape();
    let tol = ORACLE_TOL * m.amax().max(1.0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let (best, val) = (r..rows).map(|i| (i, m[(i, col)].abs())).fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            continue;
        }
        m.swap_rows(r, best);
        let p = m[(r, col)];
        for j in 0..cols {
            m[(r, j)] /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = m[(i, col)];
                if f != 0.0 {
                    for j in 0..cols {
                        let v = m[(r, j)];
                        m[(i, j)] -= f * v;
                    }
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

pub fn real_rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    rref(&mut m.clone()).len()
}

/// Real null-space basis (not orthonormal), columns.
pub fn real_null(m: &DMatrix<f64>) -> DMatrix<f64> {
    let cols = m.ncols();
    let mut e = m.clone();
    let pivots = rref(&mut e);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = DMatrix::zeros(cols, free.len());
    for (k, &fc) in free.iter().enumerate() {
        out[(fc, k)] = 1.0;
        for (r, &pc) in pivots.iter().enumerate() {
            out[(pc, k)] = -e[(r, fc)];
        }
    }
    out
}

/// Complex dimension of the column span of `m`.
pub fn complex_rank(m: &CMatrix) -> usize {
    real_rank(&real_embed(m)) / 2
}

/// Complex dimension of `dom(T^n)` for `T = {(f, Af + h) : f ⊥ C, h ∈ H}`
/// with `H = C` when `slack` and `H = {0}` otherwise: the chain space
/// `f_0, …, f_{n−1} ⊥ C`, `f_i = A f_{i−1} + h_i`, projected on `f_0`.
pub fn chain_domain_dim(a: &CMatrix, c: &CMatrix, n: usize, slack: bool) -> usize {
    let dim = a.nrows();
    let d = c.ncols();
    // f_0 = Q x with Q an orthonormal basis of C^⊥: Gram-Schmidt on [C | I]
    let full = orthonormal_columns(&hstack(c, &CMatrix::identity(dim, dim)));
    let cd = complex_rank(c);
    let q = full.columns(cd, dim - cd).clone_owned();
    let m = q.ncols();
    if n <= 1 {
        return m;
    }
    let slack_vars = if slack { d * (n - 1) } else { 0 };
    let unknowns = m + slack_vars;
    let mut cons = CMatrix::zeros(d * (n - 1), unknowns);
    // f_i as a linear map of the unknowns
    let mut f = CMatrix::zeros(dim, unknowns);
    f.view_mut((0, 0), (dim, m)).copy_from(&q);
    for i in 1..n {
        let mut next = a * &f;
        if slack {
            next.view_mut((0, m + d * (i - 1)), (dim, d)).copy_from(c);
        }
        f = next;
        cons.view_mut((d * (i - 1), 0), (d, unknowns)).copy_from(&(c.adjoint() * &f));
    }
    let null = real_null(&real_embed(&cons));
    // x-part of each real null vector, re-embedded as real rows (Re x; Im x)
    let mut xs = DMatrix::zeros(2 * m, null.ncols());
    for k in 0..null.ncols() {
        for i in 0..m {
            xs[(i, k)] = null[(i, k)];
            xs[(i + m, k)] = null[(i + unknowns, k)];
        }
    }
    real_rank(&xs) / 2
}

fn hstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut m = CMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    m
}

/// Gram-Schmidt with reorthogonalization, dropping dependent columns.
pub fn orthonormal_columns(m: &CMatrix) -> CMatrix {
    let mut out: Vec<nalgebra::DVector<nalgebra::Complex<f64>>> = Vec::new();
    let scale = m.column_iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    for col in m.column_iter() {
        let mut v = col.clone_owned();
        for _ in 0..2 {
            for u in &out {
                let p = u.dotc(&v);
                v -= u * p;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 * scale {
            out.push(v / nalgebra::Complex::new(norm, 0.0));
        }
    }
    CMatrix::from_columns(&out)
}
