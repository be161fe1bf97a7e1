//! Nonnegative atoms on which the K-functional is additive:
//! `K(t, sum_j l_j z_j) = sum_j l_j min(A_j, t B_j)` for all `l_j >= 0`.
//!
//! Weighted-l1 couples use one atom per coordinate. `(L^1, L^inf)` uses the
//! horizontal layers of `|x|`, which are nested and hence comonotone.

use crate::error::{Error, Result};
use crate::lattice::{ConcavePL, Couple, Element, Layout};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Atom {
    /// Values over the layout, all `>= 0`.
    pub z: Vec<f64>,
    /// `||z||_0`, possibly infinite.
    pub a: f64,
    /// `||z||_1`, possibly infinite.
    pub b: f64,
}

impl Atom {
    /// `floor(log2(A / B))`, with `-inf` for leg-0-only and `+inf` for leg-1-only atoms.
    pub fn block(&self) -> f64 {
        if self.b.is_infinite() {
            f64::NEG_INFINITY
        } else if self.a.is_infinite() {
            f64::INFINITY
        } else {
            (self.a / self.b).log2().floor()
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Atoms {
    pub layout: Layout,
    pub signs: Vec<f64>,
    pub atoms: Vec<Atom>,
}

enum Kind {
    Coordinates(Vec<f64>, Vec<f64>),
    Layers,
}

fn kind(couple: &Couple, n: usize) -> Result<Kind> {
    match couple {
        Couple::WeightedL1 { w0, w1 } => Ok(Kind::Coordinates(w0.clone(), w1.clone())),
        Couple::SequenceLp { p, q, w0, w1 } if *p == 1.0 && *q == 1.0 => Ok(Kind::Coordinates(
            w0.clone().unwrap_or_else(|| vec![1.0; n]),
            w1.clone().unwrap_or_else(|| vec![1.0; n]),
        )),
        Couple::SequenceLp { p, q, w0: None, w1: None } if *p == 1.0 && q.is_infinite() => Ok(Kind::Layers),
        Couple::FunctionLp { p, q } if *p == 1.0 && q.is_infinite() => Ok(Kind::Layers),
        _ => Err(Error::Unsupported(format!(
            "dyadic splitting needs a weighted-l1 or (L1, Linf) couple, got {couple:?}"
        ))),
    }
}

pub(crate) fn atoms(x: &Element, couple: &Couple) -> Result<Atoms> {
    couple.validate()?;
    couple.check_element(x)?;
    let layout = x.layout();
    let vals = x.values();
    let signs: Vec<f64> = vals.iter().map(|v| if *v < 0.0 { -1.0 } else { 1.0 }).collect();
    let abs: Vec<f64> = vals.iter().map(|v| v.abs()).collect();
    let n = abs.len();
    let mut out = Vec::new();
    match kind(couple, n)? {
        Kind::Coordinates(w0, w1) => {
            for k in 0..n {
                if abs[k] > 0.0 {
                    let mut z = vec![0.0; n];
                    z[k] = abs[k];
                    out.push(Atom { z, a: abs[k] * w0[k], b: abs[k] * w1[k] });
                }
            }
        }
        Kind::Layers => {
            let meas = layout.measures();
            let mut levels: Vec<f64> = abs.iter().copied().filter(|v| *v > 0.0).collect();
            levels.sort_by(|a, b| b.total_cmp(a));
            levels.dedup();
            for (i, v) in levels.iter().enumerate() {
                let h = v - levels.get(i + 1).copied().unwrap_or(0.0);
                let z: Vec<f64> = abs.iter().map(|a| if a >= v { h } else { 0.0 }).collect();
                let m: f64 = abs.iter().zip(&meas).filter(|(a, _)| *a >= v).map(|(_, m)| m).sum();
                out.push(Atom { z, a: h * m, b: h });
            }
        }
    }
    Ok(Atoms { layout, signs, atoms: out })
}

/// `sum_j min(A_j, t B_j)` as a curve.
pub(crate) fn atom_curve(items: impl IntoIterator<Item = (f64, f64)>) -> ConcavePL {
    let (mut alpha, mut beta) = (0.0, 0.0);
    let mut el = Vec::new();
    for (a, b) in items {
        match (a.is_finite(), b.is_finite()) {
            (true, true) => el.push((b, a / b)),
            (true, false) => alpha += a,
            (false, true) => beta += b,
            (false, false) => {}
        }
    }
    ConcavePL::from_elementary(alpha, beta, &el)
}

impl Atoms {
    /// `sum_j l_j z_j` with the signs of the original element.
    pub fn combine(&self, lambda: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.layout.len()];
        for (l, at) in lambda.iter().zip(&self.atoms) {
            if *l != 0.0 {
                for (vi, zi) in v.iter_mut().zip(&at.z) {
                    *vi += l * zi;
                }
            }
        }
        v
    }

    pub fn signed(&self, abs: Vec<f64>) -> Element {
        let v = abs.iter().zip(&self.signs).map(|(a, s)| a * s).collect();
        self.layout.build(v)
    }
}
