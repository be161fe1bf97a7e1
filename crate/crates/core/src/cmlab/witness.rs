//! `T` with `T x = y`, `||T||_{l1 -> l1} <= C` and `||T||_{linf -> linf} <= C`.
//!
//! Both norms are linear in `|T_ij|`, so with `T = P - N`, `P, N >= 0` the
//! search is a linear program: `(P - N) x = y`, column sums and row sums of
//! `P + N` at most `C`. The objective prefers little mass and the diagonal.

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kfunctional::exact::{k_exact_l1_linf, seq_as_step};
use crate::lattice::WeightedSeq;
use crate::lp::{decimal_rational, Cmp, LinearProgram, LpStatus, Scalar};

/// Largest dimension accepted by default.
pub const DEFAULT_CAP: usize = 16;
/// Up to this dimension, short-decimal inputs are solved in exact arithmetic.
pub const EXACT_DIM: usize = 8;

const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessStatus {
    Feasible,
    Infeasible,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorWitness {
    pub status: WitnessStatus,
    /// Row-major; empty unless feasible.
    pub matrix: Vec<Vec<f64>>,
    pub bound: f64,
    /// Max absolute column sum.
    pub norm_l1: f64,
    /// Max absolute row sum.
    pub norm_linf: f64,
    /// `max_i |(T x - y)_i|`.
    pub residual: f64,
    /// `sup_t K(t, T x) / K(t, x)` on `(l1, linf)`, checked on the witness itself.
    pub domination_audit: Option<f64>,
    pub exact: bool,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessConfig {
    pub cap: usize,
    /// Use exact rational pivoting when the inputs allow it.
    pub exact: bool,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig { cap: DEFAULT_CAP, exact: true }
    }
}

fn build<S: Scalar>(x: &[S], y: &[S], c: &S) -> LinearProgram<S> {
    let (m, n) = (y.len(), x.len());
    let nv = 2 * m * n;
    let var = |i: usize, j: usize, neg: bool| 2 * (i * n + j) + usize::from(neg);
    let mut lp = LinearProgram::<S>::new(nv);
    for i in 0..m {
        for j in 0..n {
            let w = if i == j { S::one() } else { S::one().add(&S::one()) };
            lp.objective[var(i, j, false)] = w.clone();
            lp.objective[var(i, j, true)] = w;
        }
    }
    for i in 0..m {
        let mut row = vec![S::zero(); nv];
        for j in 0..n {
            row[var(i, j, false)] = x[j].clone();
            row[var(i, j, true)] = S::zero().sub(&x[j]);
        }
        lp.add_row(row, Cmp::Eq, y[i].clone());
    }
    for j in 0..n {
        let mut row = vec![S::zero(); nv];
        for i in 0..m {
            row[var(i, j, false)] = S::one();
            row[var(i, j, true)] = S::one();
        }
        lp.add_row(row, Cmp::Le, c.clone());
    }
    for i in 0..m {
        let mut row = vec![S::zero(); nv];
        for j in 0..n {
            row[var(i, j, false)] = S::one();
            row[var(i, j, true)] = S::one();
        }
        lp.add_row(row, Cmp::Le, c.clone());
    }
    lp
}

fn matrix<S: Scalar>(sol: &[S], m: usize, n: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|i| (0..n).map(|j| sol[2 * (i * n + j)].to_f64() - sol[2 * (i * n + j) + 1].to_f64()).collect())
        .collect()
}

/// Searches for a witness that `y` lies in the orbit of `x` with constant `c`.
pub fn cm_witness_l1_linf(x: &WeightedSeq, y: &WeightedSeq, c: f64, cfg: WitnessConfig) -> Result<OperatorWitness> {
    let (n, m) = (x.len(), y.len());
    if n == 0 || m == 0 {
        return Err(Error::invalid("empty element"));
    }
    if n.max(m) > cfg.cap {
        return Err(Error::invalid(format!("dimension {} exceeds the witness cap {}", n.max(m), cfg.cap)));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("norm bound must be finite and nonnegative, got {c}")));
    }
    let (xs, ys) = (x.entries(), y.entries());
    let exact_in = if cfg.exact && n.max(m) <= EXACT_DIM {
        let xr: Option<Vec<BigRational>> = xs.iter().map(|v| decimal_rational(*v)).collect();
        let yr: Option<Vec<BigRational>> = ys.iter().map(|v| decimal_rational(*v)).collect();
        match (xr, yr, decimal_rational(c)) {
            (Some(a), Some(b), Some(cr)) => Some((a, b, cr)),
            _ => None,
        }
    } else {
        None
    };
    let exact = exact_in.is_some();
    let (status, mat, pivots) = if xs == ys && c >= 1.0 {
        let id = (0..m).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        (LpStatus::Optimal, id, 0)
    } else if let Some((a, b, cr)) = exact_in {
        let sol = build(&a, &b, &cr).solve(MAX_PIVOTS);
        (sol.status, matrix(&sol.x, m, n), sol.pivots)
    } else {
        let sol = build(xs, ys, &c).solve(MAX_PIVOTS);
        (sol.status, matrix(&sol.x, m, n), sol.pivots)
    };
    let status = match status {
        LpStatus::Optimal => WitnessStatus::Feasible,
        LpStatus::Infeasible => WitnessStatus::Infeasible,
        LpStatus::IterationLimit => WitnessStatus::IterationLimit,
        LpStatus::Unbounded => return Err(Error::Numeric("witness program reported unbounded".into())),
    };
    if status != WitnessStatus::Feasible {
        return Ok(OperatorWitness {
            status,
            matrix: Vec::new(),
            bound: c,
            norm_l1: f64::NAN,
            norm_linf: f64::NAN,
            residual: f64::NAN,
            domination_audit: None,
            exact,
            pivots,
        });
    }
    let norm_l1 = (0..n).map(|j| (0..m).map(|i| mat[i][j].abs()).sum::<f64>()).fold(0.0, f64::max);
    let norm_linf = mat.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let tx: Vec<f64> = mat.iter().map(|r| r.iter().zip(xs).map(|(a, b)| a * b).sum()).collect();
    let residual = tx.iter().zip(ys).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let audit = if x.is_zero() {
        None
    } else {
        let kt = k_exact_l1_linf(&seq_as_step(&WeightedSeq::new(tx)?));
        let kx = k_exact_l1_linf(&seq_as_step(x));
        Some(kt.sup_ratio(&kx).value)
    };
    Ok(OperatorWitness {
        status,
        matrix: mat,
        bound: c,
        norm_l1,
        norm_linf,
        residual,
        domination_audit: audit,
        exact,
        pivots,
    })
}
