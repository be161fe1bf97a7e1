//! Numeric K-functional for lattice couples.
//!
//! Only sign-aligned pointwise splits `x0 = sign(x) y`, `0 <= y <= |x|` are
//! searched: for a lattice couple, clipping any split into this range lowers
//! both leg norms, so nothing is lost. The search starts from the two
//! truncation families `y = (|x| - c)_+` and `y = min(|x|, c)`, adds every
//! vertex of the box `[0, |x|]` in small dimension, and then runs cyclic
//! coordinate descent.
//!
//! For `(l^p, l^inf)` with `p <= 1` the first truncation family already
//! contains the optimum (it is concave between consecutive levels), and for
//! `(l^p, l^1)` with `p <= 1` the objective is concave so a vertex is optimal.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Couple, Element, Leg, PowerLeg};

const GOLDEN_ITERS: usize = 60;
const MAX_SWEEPS: usize = 200;
const MAX_LEVELS: usize = 96;
const MAX_VERTEX_DIM: usize = 10;

/// A decomposition `x = x0 + x1` and its cost `||x0||_0 + t ||x1||_1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitWitness {
    pub t: f64,
    pub x0: Element,
    pub x1: Element,
    pub value: f64,
}

/// `K(t, x)` for sequence and function `L^p` couples (`p < q`).
pub fn k_numeric(x: &Element, couple: &Couple, t: f64, eps: f64) -> Result<(f64, SplitWitness)> {
    match couple {
        Couple::SequenceLp { .. } | Couple::FunctionLp { .. } => {}
        _ => {
            return Err(Error::Unsupported(
                "numeric engine handles sequence_lp and function_lp couples".into(),
            ))
        }
    }
    couple.validate()?;
    couple.check_element(x)?;
    let (l0, l1) = couple.legs();
    k_numeric_legs(x, &l0, &l1, t, eps)
}

/// The same search for an arbitrary pair of lattice legs.
pub fn k_numeric_legs(x: &Element, leg0: &Leg, leg1: &Leg, t: f64, eps: f64) -> Result<(f64, SplitWitness)> {
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("accuracy must be positive, got {eps}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("t must be positive and finite, got {t}")));
    }
    let p0 = leg0.power_leg(x)?;
    let p1 = leg1.power_leg(x)?;
    let a: Vec<f64> = x.values().iter().map(|v| v.abs()).collect();
    let prob = Problem { a: &a, p0: &p0, p1: &p1, t };
    let y = prob.solve(eps);
    let value = prob.full(&y);
    let x0 = x.layout().build(
        x.values().iter().zip(&y).map(|(v, yk)| v.signum() * yk).collect(),
    );
    let x1 = x.layout().build(
        x.values().iter().zip(x0.values()).map(|(v, w)| v - w).collect(),
    );
    Ok((value, SplitWitness { t, x0, x1, value }))
}

struct Problem<'a> {
    a: &'a [f64],
    p0: &'a PowerLeg,
    p1: &'a PowerLeg,
    t: f64,
}

/// Running aggregate of one leg: a power sum, or the two largest terms.
#[derive(Clone, Copy)]
enum Agg {
    Sum(f64),
    Max { top: f64, arg: usize, second: f64 },
}

impl<'a> Problem<'a> {
    fn n(&self) -> usize {
        self.a.len()
    }

    fn full(&self, y: &[f64]) -> f64 {
        let r: Vec<f64> = self.a.iter().zip(y).map(|(a, y)| a - y).collect();
        combine(self.p0.norm(y), self.t, self.p1.norm(&r))
    }

    fn truncation(&self, c: f64, upper: bool) -> Vec<f64> {
        self.a
            .iter()
            .map(|a| if upper { (a - c).max(0.0) } else { a.min(c) })
            .collect()
    }

    fn solve(&self, eps: f64) -> Vec<f64> {
        let n = self.n();
        let mut best = vec![0.0; n];
        let mut best_f = self.full(&best);
        if self.a.iter().all(|v| *v == 0.0) {
            return best;
        }
        let try_y = |y: Vec<f64>, best: &mut Vec<f64>, best_f: &mut f64| {
            let f = self.full(&y);
            if f < *best_f {
                *best_f = f;
                *best = y;
            }
        };

        let (levels, thinned) = self.levels();
        // against a flat sup-norm with p <= 1 the upper family is concave
        // between levels, so its best level is the optimum
        let flat_sup = self.p1.p.is_infinite() && self.p1.coef.iter().all(|c| *c == self.p1.coef[0]);
        if flat_sup && self.p0.p <= 1.0 && !thinned {
            let vals: Vec<f64> = levels.iter().map(|c| self.full(&self.truncation(*c, true))).collect();
            let (i, _) = argmin(&vals);
            try_y(self.truncation(levels[i], true), &mut best, &mut best_f);
            return best;
        }
        for upper in [true, false] {
            let vals: Vec<f64> = levels.iter().map(|c| self.full(&self.truncation(*c, upper))).collect();
            let (i, _) = argmin(&vals);
            try_y(self.truncation(levels[i], upper), &mut best, &mut best_f);
            // refine between the neighbouring levels
            let lo = levels[i.saturating_sub(1)];
            let hi = levels[(i + 1).min(levels.len() - 1)];
            if hi > lo {
                let c = golden(lo, hi, |c| self.full(&self.truncation(c, upper)));
                try_y(self.truncation(c, upper), &mut best, &mut best_f);
            }
        }

        let support: Vec<usize> = (0..n).filter(|k| self.a[*k] > 0.0).collect();
        if support.len() <= MAX_VERTEX_DIM {
            for mask in 0u32..(1u32 << support.len()) {
                let mut y = vec![0.0; n];
                for (bit, k) in support.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        y[*k] = self.a[*k];
                    }
                }
                try_y(y, &mut best, &mut best_f);
            }
        }

        self.descend(best, eps)
    }

    /// Distinct truncation levels: zero and the distinct magnitudes,
    /// thinned to quantiles when there are many. The flag is set when thinned.
    fn levels(&self) -> (Vec<f64>, bool) {
        let mut v: Vec<f64> = self.a.iter().copied().filter(|a| *a > 0.0).collect();
        v.push(0.0);
        v.sort_by(f64::total_cmp);
        v.dedup();
        if v.len() > MAX_LEVELS {
            let m = v.len() - 1;
            let mut q: Vec<f64> = (0..MAX_LEVELS).map(|i| v[i * m / (MAX_LEVELS - 1)]).collect();
            q.dedup();
            return (q, true);
        }
        (v, false)
    }

    fn agg(&self, leg: &PowerLeg, vals: &[f64]) -> Agg {
        if leg.p.is_infinite() {
            let (mut top, mut arg, mut second) = (0.0, usize::MAX, 0.0);
            for (k, v) in vals.iter().enumerate() {
                let term = leg.term(k, *v);
                if term > top {
                    second = top;
                    top = term;
                    arg = k;
                } else if term > second {
                    second = term;
                }
            }
            Agg::Max { top, arg, second }
        } else {
            Agg::Sum(leg.power_sum(vals))
        }
    }

    /// Norm of the leg after replacing atom `k`'s value `old` by `new`.
    fn with(leg: &PowerLeg, agg: Agg, k: usize, old: f64, new: f64) -> f64 {
        match agg {
            Agg::Sum(s) => leg.root((s - leg.term(k, old) + leg.term(k, new)).max(0.0)),
            Agg::Max { top, arg, second } => {
                let others = if arg == k { second } else { top };
                others.max(leg.term(k, new))
            }
        }
    }

    fn descend(&self, mut y: Vec<f64>, eps: f64) -> Vec<f64> {
        let n = self.n();
        let t = self.t;
        let mut f = self.full(&y);
        for _ in 0..MAX_SWEEPS {
            let f_start = f;
            let mut r: Vec<f64> = self.a.iter().zip(&y).map(|(a, y)| a - y).collect();
            let mut g0 = self.agg(self.p0, &y);
            let mut g1 = self.agg(self.p1, &r);
            for k in 0..n {
                let ak = self.a[k];
                if ak == 0.0 {
                    continue;
                }
                let (yk, rk) = (y[k], r[k]);
                let obj = |v: f64| {
                    combine(
                        Self::with(self.p0, g0, k, yk, v),
                        t,
                        Self::with(self.p1, g1, k, rk, ak - v),
                    )
                };
                let mut cands = vec![0.0, ak, yk];
                if let Agg::Max { top, arg, second } = g0 {
                    let m = if arg == k { second } else { top };
                    cands.push(m / self.p0.coef[k]);
                }
                if let Agg::Max { top, arg, second } = g1 {
                    let m = if arg == k { second } else { top };
                    cands.push(ak - m / self.p1.coef[k]);
                }
                for i in 1..16 {
                    cands.push(ak * i as f64 / 16.0);
                }
                let mut cands: Vec<f64> =
                    cands.into_iter().filter(|v| v.is_finite()).map(|v| v.clamp(0.0, ak)).collect();
                cands.sort_by(f64::total_cmp);
                cands.dedup();
                let vals: Vec<f64> = cands.iter().map(|v| obj(*v)).collect();
                let (i, _) = argmin(&vals);
                let (mut v, mut fv) = (cands[i], vals[i]);
                let lo = cands[i.saturating_sub(1)];
                let hi = cands[(i + 1).min(cands.len() - 1)];
                if hi > lo {
                    let g = golden(lo, hi, obj);
                    let fg = obj(g);
                    if fg < fv {
                        v = g;
                        fv = fg;
                    }
                }
                let current = obj(yk);
                if fv < current {
                    y[k] = v;
                    r[k] = ak - v;
                    g0 = self.agg(self.p0, &y);
                    g1 = self.agg(self.p1, &r);
                }
            }
            f = self.full(&y);
            if !(f < f_start - 0.01 * eps * f_start.max(f64::MIN_POSITIVE)) {
                break;
            }
        }
        y
    }
}

fn combine(n0: f64, t: f64, n1: f64) -> f64 {
    // avoid inf * 0 when a leg is infinite on an empty part
    if n1 == 0.0 {
        n0
    } else {
        n0 + t * n1
    }
}

fn argmin(v: &[f64]) -> (usize, f64) {
    let mut best = (0, v[0]);
    for (i, x) in v.iter().enumerate() {
        if *x < best.1 {
            best = (i, *x);
        }
    }
    best
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
fn golden(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}
