//! Shared oracles and generators for the integration tests.
#![allow(dead_code)]

use kdiv::rng::Rng;
use kdiv::{ConcavePL, Element};
use rand::Rng as _;

pub const SPLIT_POINTS: usize = 21;
const MAX_ROUNDS: usize = 200;
const MIN_STEP: f64 = 1e-9;

/// 33 dyadic values `2^(k/2)`, `k = -16..=16`.
pub fn oracle_ts() -> Vec<f64> {
    (-16..=16).map(|k| 2f64.powf(k as f64 / 2.0)).collect()
}

#[derive(Clone, Copy)]
pub enum Agg {
    Sum,
    Max,
}

impl Agg {
    fn fold(self, acc: f64, v: f64) -> f64 {
        match self {
            Agg::Sum => acc + v,
            Agg::Max => acc.max(v),
        }
    }
}

/// A split cost `finish(A0, A1)` where `A_j` aggregates per-coordinate terms
/// `term(k, s_k).j` by sum or max, and `s_k` is the fraction of coordinate
/// `k` (of size `size[k]`) sent to the first leg.
pub struct SplitCost<'a> {
    pub size: &'a [f64],
    pub term: &'a dyn Fn(usize, f64) -> (f64, f64),
    pub agg: (Agg, Agg),
    pub finish: &'a dyn Fn(f64, f64) -> f64,
}

fn scan(c: &SplitCost, tables: &[Vec<(f64, f64, f64)>], k: usize, acc: (f64, f64), pick: &mut [usize], best: &mut (f64, Vec<usize>)) {
    if k == c.size.len() {
        let v = (c.finish)(acc.0, acc.1);
        if v < best.0 {
            best.0 = v;
            best.1.copy_from_slice(pick);
        }
        return;
    }
    for (i, (_, a, b)) in tables[k].iter().enumerate() {
        pick[k] = i;
        scan(c, tables, k + 1, (c.agg.0.fold(acc.0, *a), c.agg.1.fold(acc.1, *b)), pick, best);
    }
}

fn search(c: &SplitCost, cols: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let tables: Vec<Vec<(f64, f64, f64)>> = cols
        .iter()
        .enumerate()
        .map(|(k, col)| {
            col.iter()
                .map(|s| {
                    let (a, b) = (c.term)(k, *s);
                    (*s, a, b)
                })
                .collect()
        })
        .collect();
    let n = cols.len();
    let mut best = (f64::INFINITY, vec![0usize; n]);
    scan(c, &tables, 0, (0.0, 0.0), &mut vec![0; n], &mut best);
    (best.0, (0..n).map(|k| tables[k][best.1[k]].0).collect())
}

/// Minimum of a split cost over `s in [0, 1]^n`.
///
/// The first pass is a 21-point grid of fractions per coordinate. It is
/// refined by 21-point grids in the amount `(1 - s_k) size_k` moved to the
/// second leg, with one step shared by all coordinates, so the directions
/// along which several coordinates keep equal second-leg parts stay on the
/// grid. The box recentres while its best point improves and sits on an edge,
/// and shrinks otherwise.
pub fn grid_min(c: &SplitCost) -> f64 {
    let n = c.size.len();
    let half = (SPLIT_POINTS - 1) / 2;
    let coarse: Vec<Vec<f64>> =
        (0..n).map(|_| (0..SPLIT_POINTS).map(|i| i as f64 / (SPLIT_POINTS - 1) as f64).collect()).collect();
    let (mut best, mut s) = search(c, &coarse);
    let top = c.size.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return best;
    }
    let mut h = 3.0 * top / (SPLIT_POINTS - 1) as f64 / half as f64;
    for _ in 0..MAX_ROUNDS {
        let mut edge = false;
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let a = c.size[k];
                if a == 0.0 {
                    return vec![1.0];
                }
                let u = (1.0 - s[k]) * a;
                let mut col: Vec<f64> = (0..SPLIT_POINTS)
                    .map(|i| 1.0 - (u + (i as f64 - half as f64) * h).clamp(0.0, a) / a)
                    .collect();
                col.dedup();
                col
            })
            .collect();
        let (v, s_new) = search(c, &cols);
        for k in 0..n {
            let a = c.size[k];
            if a > 0.0 {
                let i = ((1.0 - s_new[k]) * a - (1.0 - s[k]) * a) / h;
                let inside = s_new[k] > 0.0 && s_new[k] < 1.0;
                edge |= inside && i.abs() >= half as f64 - 0.5;
            }
        }
        let improved = v < best;
        if v <= best {
            best = v;
            s = s_new;
        }
        if !(edge && improved) {
            h *= 6.0 / (SPLIT_POINTS - 1) as f64;
            if h < MIN_STEP * top {
                break;
            }
        }
    }
    best
}

fn leg_agg(p: f64) -> Agg {
    if p.is_infinite() {
        Agg::Max
    } else {
        Agg::Sum
    }
}

fn leg_term(v: f64, p: f64) -> f64 {
    if p.is_infinite() {
        v
    } else {
        v.powf(p)
    }
}

fn leg_finish(a: f64, p: f64) -> f64 {
    if p.is_infinite() {
        a
    } else {
        a.powf(1.0 / p)
    }
}

/// `K(t, a; l^p, l^q)` over pointwise splits `x0 = s a`, `x1 = (1 - s) a`.
pub fn brute_k_seq(a: &[f64], p: f64, q: f64, t: f64) -> f64 {
    let a: Vec<f64> = a.iter().map(|v| v.abs()).collect();
    grid_min(&SplitCost {
        size: &a,
        term: &|k, s| (leg_term(s * a[k], p), leg_term((1.0 - s) * a[k], q)),
        agg: (leg_agg(p), leg_agg(q)),
        finish: &|u, v| leg_finish(u, p) + t * leg_finish(v, q),
    })
}

/// `K(t, x; l^1(w0), l^1(w1))` over pointwise splits.
pub fn brute_k_weighted(a: &[f64], w0: &[f64], w1: &[f64], t: f64) -> f64 {
    let size: Vec<f64> = a.iter().map(|v| v.abs()).collect();
    grid_min(&SplitCost {
        size: &size,
        term: &|k, s| (s * a[k].abs() * w0[k], (1.0 - s) * a[k].abs() * w1[k]),
        agg: (Agg::Sum, Agg::Sum),
        finish: &|u, v| u + t * v,
    })
}

/// `(L^1, L^inf)` for a step function given as `(length, |value|)` pieces.
pub fn brute_k_l1_linf(pieces: &[(f64, f64)], t: f64) -> f64 {
    let size: Vec<f64> = pieces.iter().map(|p| p.1).collect();
    grid_min(&SplitCost {
        size: &size,
        term: &|k, s| (s * pieces[k].1 * pieces[k].0, (1.0 - s) * pieces[k].1),
        agg: (Agg::Sum, Agg::Max),
        finish: &|u, v| u + t * v,
    })
}

/// `(L^inf, L^inf(1/t))` for pieces `(a, b, |value|)`; the second part is
/// constant on each piece, so its norm is `value / a`.
pub fn brute_k_hull(pieces: &[(f64, f64, f64)], t: f64) -> f64 {
    let size: Vec<f64> = pieces.iter().map(|p| p.2).collect();
    grid_min(&SplitCost {
        size: &size,
        term: &|k, s| {
            let (a, _, v) = pieces[k];
            let part = (1.0 - s) * v;
            (s * v, if part == 0.0 { 0.0 } else if a == 0.0 { f64::INFINITY } else { part / a })
        },
        agg: (Agg::Max, Agg::Max),
        finish: &|u, v| u + t * v,
    })
}

pub fn rand_vec(rng: &mut Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let v: f64 = rng.gen_range(0.05..1.0);
            if rng.gen_bool(0.3) {
                -v
            } else {
                v
            }
        })
        .collect()
}

/// Entries with three decimals, for the exact LP path.
pub fn rand_decimal_vec(rng: &mut Rng, n: usize, zero_prob: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(zero_prob) { 0.0 } else { rng.gen_range(1..=1000) as f64 / 1000.0 })
        .collect();
    if v.iter().all(|x| *x == 0.0) {
        v[0] = 1.0;
    }
    v
}

pub fn rand_weights(rng: &mut Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 2f64.powf(rng.gen_range(-4.0..4.0))).collect()
}

/// Step function with `m` pieces on random breaks in `(0, 8]`.
pub fn rand_step(rng: &mut Rng, m: usize) -> Element {
    let mut breaks = vec![0.0];
    for _ in 0..m {
        let last = *breaks.last().unwrap();
        breaks.push(last + rng.gen_range(0.1..2.0));
    }
    let values = rand_vec(rng, m);
    Element::step(breaks, values).unwrap()
}

/// `alpha + beta t + sum m_j min(r_j, t)` with random parameters.
pub fn rand_conv(rng: &mut Rng) -> ConcavePL {
    let alpha = if rng.gen_bool(0.3) { rng.gen_range(0.0..1.0) } else { 0.0 };
    let beta = if rng.gen_bool(0.3) { rng.gen_range(0.0..0.5) } else { 0.0 };
    let k = rng.gen_range(1..=4);
    let atoms: Vec<(f64, f64)> =
        (0..k).map(|_| (rng.gen_range(0.05..2.0), 2f64.powf(rng.gen_range(-6.0..6.0)))).collect();
    ConcavePL::from_elementary(alpha, beta, &atoms)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
