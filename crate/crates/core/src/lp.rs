//! Dense two-phase simplex, generic over the scalar field.
//!
//! Both fields pick the entering column by most negative reduced cost and
//! fall back to Bland's rule after a run of degenerate pivots. With
//! [`BigRational`] the ratio test is Bland's and the result is exact. `f64`
//! first equilibrates rows and columns by powers of two and uses a Harris
//! ratio test that prefers large pivots.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub trait Scalar: Clone + Debug + PartialOrd {
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_zero_exact(&self) -> bool;
}

const F64_TOL: f64 = 1e-9;
/// Feasibility slack in the Harris ratio test.
const HARRIS_DELTA: f64 = 1e-9;
/// Degenerate pivots in a row before switching to Bland's rule.
const STALL: usize = 50;

impl Scalar for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_pos(&self) -> bool {
        *self > F64_TOL
    }
    fn is_neg(&self) -> bool {
        *self < -F64_TOL
    }
    fn is_zero_exact(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_f64(x: f64) -> Self {
        decimal_rational(x)
            .or_else(|| BigRational::from_float(x))
            .expect("finite value")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn is_zero_exact(&self) -> bool {
        self.is_zero()
    }
}

/// Maximum significant decimal digits for a value to count as "short".
pub const SHORT_DIGITS: usize = 12;

/// The rational with the same shortest decimal expansion as `x`, if that
/// expansion has at most [`SHORT_DIGITS`] significant digits.
pub fn decimal_rational(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let s = format!("{x}");
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.as_str()),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits: String = format!("{int}{frac}");
    let sig = digits.trim_start_matches('0').trim_end_matches('0').len();
    if sig > SHORT_DIGITS {
        return None;
    }
    let num: BigInt = digits.parse().ok()?;
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    let r = BigRational::new(num, den);
    Some(if neg { -r } else { r })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

/// Minimize `objective . x` subject to `rows`, `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<S> {
    pub n_vars: usize,
    pub objective: Vec<S>,
    pub rows: Vec<(Vec<S>, Cmp, S)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution<S> {
    pub status: LpStatus,
    pub x: Vec<S>,
    pub value: S,
    pub pivots: usize,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram { n_vars, objective: vec![S::zero(); n_vars], rows: Vec::new() }
    }

    pub fn add_row(&mut self, coeffs: Vec<S>, cmp: Cmp, rhs: S) {
        assert_eq!(coeffs.len(), self.n_vars);
        self.rows.push((coeffs, cmp, rhs));
    }

    pub fn solve(&self, max_pivots: usize) -> LpSolution<S> {
        if S::EXACT {
            return Tableau::build(self).run(self, max_pivots);
        }
        let (scaled, col) = self.equilibrate();
        let mut sol = Tableau::build(&scaled).run(&scaled, max_pivots);
        for (x, c) in sol.x.iter_mut().zip(&col) {
            *x = x.mul(c);
        }
        sol
    }

    /// Power-of-two row then column scaling; returns the column factors.
    fn equilibrate(&self) -> (LinearProgram<S>, Vec<S>) {
        let pow2 = |m: f64| if m > 0.0 && m.is_finite() { 2f64.powi(-(m.log2().round() as i32)) } else { 1.0 };
        let mut lp = self.clone();
        for (row, _, rhs) in lp.rows.iter_mut() {
            let m = row.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
            let f = S::from_f64(pow2(m));
            row.iter_mut().for_each(|v| *v = v.mul(&f));
            *rhs = rhs.mul(&f);
        }
        let col: Vec<S> = (0..lp.n_vars)
            .map(|j| {
                let m = lp.rows.iter().map(|r| r.0[j].to_f64().abs()).fold(0.0, f64::max);
                S::from_f64(pow2(m))
            })
            .collect();
        for (row, _, _) in lp.rows.iter_mut() {
            row.iter_mut().zip(&col).for_each(|(v, c)| *v = v.mul(c));
        }
        lp.objective.iter_mut().zip(&col).for_each(|(v, c)| *v = v.mul(c));
        (lp, col)
    }
}

struct Tableau<S> {
    t: Vec<Vec<S>>,
    basis: Vec<usize>,
    n_cols: usize,
    artificial_from: usize,
}

impl<S: Scalar> Tableau<S> {
    fn build(lp: &LinearProgram<S>) -> Self {
        let m = lp.rows.len();
        let n = lp.n_vars;
        let n_slack = lp.rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        let n_art = lp
            .rows
            .iter()
            .filter(|r| {
                let flip = r.2.is_neg();
                let cmp = flip_cmp(r.1, flip);
                cmp != Cmp::Le
            })
            .count();
        let n_cols = n + n_slack + n_art;
        let artificial_from = n + n_slack;
        let mut t = vec![vec![S::zero(); n_cols + 1]; m];
        let mut basis = vec![0; m];
        let (mut slack, mut art) = (n, artificial_from);
        for (i, (coeffs, cmp, rhs)) in lp.rows.iter().enumerate() {
            let flip = rhs.is_neg();
            let sign = |v: &S| if flip { S::zero().sub(v) } else { v.clone() };
            for j in 0..n {
                t[i][j] = sign(&coeffs[j]);
            }
            t[i][n_cols] = sign(rhs);
            match flip_cmp(*cmp, flip) {
                Cmp::Le => {
                    t[i][slack] = S::one();
                    basis[i] = slack;
                    slack += 1;
                }
                Cmp::Ge => {
                    t[i][slack] = S::zero().sub(&S::one());
                    slack += 1;
                    t[i][art] = S::one();
                    basis[i] = art;
                    art += 1;
                }
                Cmp::Eq => {
                    t[i][art] = S::one();
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        Tableau { t, basis, n_cols, artificial_from }
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [S]) {
        let piv = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v = v.div(&piv);
        }
        let row = self.t[r].clone();
        for (i, other) in self.t.iter_mut().enumerate() {
            if i != r && !other[c].is_zero_exact() {
                let f = other[c].clone();
                for (v, rv) in other.iter_mut().zip(&row) {
                    if !rv.is_zero_exact() {
                        *v = v.sub(&f.mul(rv));
                    }
                }
            }
        }
        if !obj[c].is_zero_exact() {
            let f = obj[c].clone();
            for (v, rv) in obj.iter_mut().zip(&row) {
                if !rv.is_zero_exact() {
                    *v = v.sub(&f.mul(rv));
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row for `cost` (length `n_cols`), with `-z` in the last slot.
    fn objective_row(&self, cost: &[S]) -> Vec<S> {
        let mut obj: Vec<S> = cost.to_vec();
        obj.push(S::zero());
        for (i, b) in self.basis.iter().enumerate() {
            let cb = cost[*b].clone();
            if !cb.is_zero_exact() {
                for (v, tv) in obj.iter_mut().zip(&self.t[i]) {
                    *v = v.sub(&cb.mul(tv));
                }
            }
        }
        obj
    }

    /// Simplex iterations. Returns `Err(status)` on unbounded/limit.
    fn iterate(&mut self, obj: &mut [S], allowed: usize, pivots: &mut usize, max: usize) -> Result<(), LpStatus> {
        let mut stall = 0;
        loop {
            let entering = if stall >= STALL {
                (0..allowed).find(|j| obj[*j].is_neg())
            } else {
                (0..allowed)
                    .filter(|j| obj[*j].is_neg())
                    .fold(None, |best: Option<usize>, j| match best {
                        Some(b) if obj[b] <= obj[j] => Some(b),
                        _ => Some(j),
                    })
            };
            let Some(c) = entering else {
                return Ok(());
            };
            let leaving = if S::EXACT { self.ratio_bland(c) } else { self.ratio_harris(c) };
            let Some(r) = leaving else {
                return Err(LpStatus::Unbounded);
            };
            if *pivots >= max {
                return Err(LpStatus::IterationLimit);
            }
            let step = self.t[r][self.n_cols].div(&self.t[r][c]);
            stall = if step.is_pos() { 0 } else { stall + 1 };
            self.pivot(r, c, obj);
            *pivots += 1;
        }
    }

    fn ratio_bland(&self, c: usize) -> Option<usize> {
        let mut best: Option<(usize, S)> = None;
        for i in 0..self.t.len() {
            let a = &self.t[i][c];
            if a.is_pos() {
                let ratio = self.t[i][self.n_cols].div(a);
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        best.map(|b| b.0)
    }

    /// Two-pass Harris test: bound the step with relaxed bounds, then take
    /// the largest pivot among rows within that bound.
    fn ratio_harris(&self, c: usize) -> Option<usize> {
        let rhs = |i: usize| self.t[i][self.n_cols].to_f64();
        let a = |i: usize| self.t[i][c].to_f64();
        let rows = || (0..self.t.len()).filter(|i| a(*i) > F64_TOL);
        let theta = rows().map(|i| (rhs(i).max(0.0) + HARRIS_DELTA) / a(i)).fold(f64::INFINITY, f64::min);
        if theta.is_infinite() {
            return None;
        }
        rows()
            .filter(|i| rhs(*i).max(0.0) / a(*i) <= theta)
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if a(b) > a(i) || (a(b) == a(i) && self.basis[b] < self.basis[i]) => Some(b),
                _ => Some(i),
            })
    }

    fn run(mut self, lp: &LinearProgram<S>, max: usize) -> LpSolution<S> {
        let n = lp.n_vars;
        let mut pivots = 0;
        let fail = |status, pivots| LpSolution { status, x: vec![S::zero(); n], value: S::zero(), pivots };

        if self.artificial_from < self.n_cols {
            let mut cost = vec![S::zero(); self.n_cols];
            for c in cost.iter_mut().skip(self.artificial_from) {
                *c = S::one();
            }
            let mut obj = self.objective_row(&cost);
            if let Err(s) = self.iterate(&mut obj, self.n_cols, &mut pivots, max) {
                // phase one is bounded below by zero
                return fail(if s == LpStatus::Unbounded { LpStatus::Infeasible } else { s }, pivots);
            }
            let infeas = S::zero().sub(&obj[self.n_cols]);
            if infeas.is_pos() {
                return fail(LpStatus::Infeasible, pivots);
            }
            // drive remaining artificials out of the basis where possible
            for r in 0..self.t.len() {
                if self.basis[r] >= self.artificial_from {
                    if let Some(c) = (0..self.artificial_from).find(|j| {
                        let v = &self.t[r][*j];
                        v.is_pos() || v.is_neg()
                    }) {
                        self.pivot(r, c, &mut obj);
                        pivots += 1;
                    }
                }
            }
        }

        let mut cost = lp.objective.clone();
        cost.resize(self.n_cols, S::zero());
        let mut obj = self.objective_row(&cost);
        if let Err(s) = self.iterate(&mut obj, self.artificial_from, &mut pivots, max) {
            return fail(s, pivots);
        }
        let mut x = vec![S::zero(); n];
        for (i, b) in self.basis.iter().enumerate() {
            if *b < n {
                x[*b] = self.t[i][self.n_cols].clone();
            }
        }
        let value = S::zero().sub(&obj[self.n_cols]);
        LpSolution { status: LpStatus::Optimal, x, value, pivots }
    }
}

fn flip_cmp(c: Cmp, flip: bool) -> Cmp {
    match (c, flip) {
        (Cmp::Le, true) => Cmp::Ge,
        (Cmp::Ge, true) => Cmp::Le,
        (c, _) => c,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_lp_f64() {
        // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6
        let mut lp = LinearProgram::<f64>::new(2);
        lp.objective = vec![-1.0, -1.0];
        lp.add_row(vec![1.0, 2.0], Cmp::Le, 4.0);
        lp.add_row(vec![3.0, 1.0], Cmp::Le, 6.0);
        let s = lp.solve(100);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.6).abs() < 1e-12 && (s.x[1] - 1.2).abs() < 1e-12);
        assert!((s.value + 2.8).abs() < 1e-12);
    }

    #[test]
    fn exact_equalities() {
        // x + y = 1, x - y >= 1/3, min y
        let mut lp = LinearProgram::<BigRational>::new(2);
        lp.objective = vec![r(0, 1), r(1, 1)];
        lp.add_row(vec![r(1, 1), r(1, 1)], Cmp::Eq, r(1, 1));
        lp.add_row(vec![r(1, 1), r(-1, 1)], Cmp::Ge, r(1, 3));
        let s = lp.solve(100);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.x, vec![r(1, 1), r(0, 1)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::<f64>::new(1);
        lp.add_row(vec![1.0], Cmp::Ge, 2.0);
        lp.add_row(vec![1.0], Cmp::Le, 1.0);
        assert_eq!(lp.solve(100).status, LpStatus::Infeasible);
        let mut lp = LinearProgram::<f64>::new(1);
        lp.objective = vec![-1.0];
        lp.add_row(vec![1.0], Cmp::Ge, 0.0);
        assert_eq!(lp.solve(100).status, LpStatus::Unbounded);
    }

    #[test]
    fn negative_rhs_and_limit() {
        let mut lp = LinearProgram::<f64>::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add_row(vec![-1.0, -1.0], Cmp::Le, -3.0);
        let s = lp.solve(100);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 3.0).abs() < 1e-12);
        assert_eq!(lp.solve(0).status, LpStatus::IterationLimit);
    }

    #[test]
    fn short_decimals() {
        assert_eq!(decimal_rational(1.000001), Some(r(1000001, 1000000)));
        assert_eq!(decimal_rational(-0.125), Some(r(-1, 8)));
        assert_eq!(decimal_rational(3.0), Some(r(3, 1)));
        assert_eq!(decimal_rational(0.1 + 0.2), None);
    }
}
