//! `K(t, x; X_0, X_1) = inf { ||x_0||_0 + t ||x_1||_1 : x = x_0 + x_1 }`.

mod conv_element;
pub mod exact;
mod numeric;

use serde::Serialize;

pub use conv_element::{conv_to_element, dyadic_range, dyadic_weights, equivalence_band, DyadicElement};
pub use numeric::{k_numeric, k_numeric_legs, SplitWitness};

use crate::error::Result;
use crate::grid::DyadicGrid;
use crate::lattice::{ConcavePL, Couple, Element, WeightedSeq};
use exact::{k_exact_l1_linf, k_exact_linfty_couple, k_exact_weighted_l1, k_weighted_l1_value, seq_as_step};

/// Default relative accuracy handed to the numeric engine.
pub const DEFAULT_ACCURACY: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactWeightedL1,
    #[serde(rename = "exact-L1Linf")]
    ExactL1Linf,
    ExactHull,
    Numeric,
}

/// A K-functional as a concave piecewise-linear curve.
///
/// Exact engines return the curve itself. The numeric engine returns the
/// upper hull of its grid samples, which is concave and lies above the true
/// K-functional at every sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KCurve {
    pub curve: ConcavePL,
    pub couple: Couple,
    pub method: Method,
    pub accuracy: f64,
}

impl KCurve {
    pub fn eval(&self, t: f64) -> f64 {
        self.curve.eval(t)
    }

    pub fn sample(&self, grid: &DyadicGrid) -> Vec<(f64, f64)> {
        grid.points().into_iter().map(|t| (t, self.curve.eval(t))).collect()
    }
}

/// The engine [`k_curve`] will use for `couple`.
pub fn method_for(couple: &Couple) -> Method {
    match couple {
        Couple::WeightedL1 { .. } => Method::ExactWeightedL1,
        Couple::SequenceLp { p, q, .. } if *p == 1.0 && *q == 1.0 => Method::ExactWeightedL1,
        Couple::SequenceLp { p, q, w0: None, w1: None } if *p == 1.0 && q.is_infinite() => Method::ExactL1Linf,
        Couple::FunctionLp { p, q } if *p == 1.0 && q.is_infinite() => Method::ExactL1Linf,
        Couple::LinftyCouple => Method::ExactHull,
        _ => Method::Numeric,
    }
}

fn weights_of(couple: &Couple, n: usize) -> (Vec<f64>, Vec<f64>) {
    match couple {
        Couple::WeightedL1 { w0, w1 } => (w0.clone(), w1.clone()),
        Couple::SequenceLp { w0, w1, .. } => (
            w0.clone().unwrap_or_else(|| vec![1.0; n]),
            w1.clone().unwrap_or_else(|| vec![1.0; n]),
        ),
        _ => unreachable!("weights only for sequence couples"),
    }
}

fn as_seq(x: &Element) -> &WeightedSeq {
    match x {
        Element::Seq(s) => s,
        Element::Step(_) => unreachable!("checked by check_element"),
    }
}

fn exact_curve(x: &Element, couple: &Couple, method: Method) -> Result<ConcavePL> {
    Ok(match (method, x) {
        (Method::ExactWeightedL1, _) => {
            let (w0, w1) = weights_of(couple, x.len());
            k_exact_weighted_l1(as_seq(x), &w0, &w1)?
        }
        (Method::ExactL1Linf, Element::Seq(s)) => k_exact_l1_linf(&seq_as_step(s)),
        (Method::ExactL1Linf, Element::Step(f)) => k_exact_l1_linf(f),
        (Method::ExactHull, Element::Step(h)) => k_exact_linfty_couple(h),
        _ => unreachable!("exact method chosen for a matching couple"),
    })
}

/// `K(t, x)` for any supported couple.
pub fn k_value(x: &Element, couple: &Couple, t: f64, accuracy: f64) -> Result<f64> {
    couple.validate()?;
    couple.check_element(x)?;
    match method_for(couple) {
        Method::Numeric => Ok(k_numeric(x, couple, t, accuracy)?.0),
        Method::ExactWeightedL1 => {
            let (w0, w1) = weights_of(couple, x.len());
            k_weighted_l1_value(as_seq(x), &w0, &w1, t)
        }
        m => Ok(exact_curve(x, couple, m)?.eval(t)),
    }
}

/// The K-curve of `x`. The grid is only used by the numeric engine.
pub fn k_curve(x: &Element, couple: &Couple, grid: &DyadicGrid, accuracy: f64) -> Result<KCurve> {
    couple.validate()?;
    couple.check_element(x)?;
    let method = method_for(couple);
    let curve = match method {
        Method::Numeric => numeric_curve(x, couple, grid, accuracy)?,
        m => exact_curve(x, couple, m)?,
    };
    Ok(KCurve { curve, couple: couple.clone(), method, accuracy: if method == Method::Numeric { accuracy } else { 0.0 } })
}

fn numeric_curve(x: &Element, couple: &Couple, grid: &DyadicGrid, eps: f64) -> Result<ConcavePL> {
    let mut pts = vec![(0.0, 0.0)];
    for t in grid.points() {
        pts.push((t, k_numeric(x, couple, t, eps)?.0));
    }
    // continue past the grid until the curve reaches ||x||_0
    let top = couple.leg(0).norm(x)?;
    let (mut t, mut v) = *pts.last().unwrap();
    let mut steps = 0;
    while top.is_finite() && v < top * (1.0 - eps) && steps < 64 {
        t *= 2.0;
        v = k_numeric(x, couple, t, eps)?.0;
        pts.push((t, v));
        steps += 1;
    }
    Ok(ConcavePL::hull(&pts, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn dispatch() {
        assert_eq!(method_for(&Couple::sequence(1.0, INF)), Method::ExactL1Linf);
        assert_eq!(method_for(&Couple::sequence(0.5, INF)), Method::Numeric);
        assert_eq!(method_for(&Couple::function(1.0, INF)), Method::ExactL1Linf);
        assert_eq!(method_for(&Couple::LinftyCouple), Method::ExactHull);
        assert_eq!(method_for(&Couple::sequence(1.0, 1.0)), Method::ExactWeightedL1);
    }

    #[test]
    fn numeric_curve_limits() {
        let x = Element::seq(vec![1.0, 0.5, 0.25]).unwrap();
        let c = Couple::sequence(0.5, INF);
        let g = DyadicGrid::new(-4, 4, 2).unwrap();
        let k = k_curve(&x, &c, &g, 1e-9).unwrap();
        let top = c.leg(0).norm(&x).unwrap();
        assert!((k.curve.sup_value() - top).abs() <= 1e-9 * top);
        assert!(k.curve.slack() >= -1e-9);
        // near zero the curve is t ||x||_inf
        assert!((k.eval(1.0 / 16.0) - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn method_tags_serialize() {
        assert_eq!(serde_json::to_string(&Method::ExactL1Linf).unwrap(), "\"exact-L1Linf\"");
        assert_eq!(serde_json::to_string(&Method::ExactWeightedL1).unwrap(), "\"exact-weighted-l1\"");
    }
}
