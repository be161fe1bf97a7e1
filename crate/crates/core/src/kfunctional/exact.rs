use crate::error::{Error, Result};
use crate::lattice::{decreasing_rearrangement, least_concave_majorant, ConcavePL, StepFunction, WeightedSeq};

fn check_weights(x: &WeightedSeq, w0: &[f64], w1: &[f64]) -> Result<()> {
    if w0.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: w0.len(), got: x.len() });
    }
    if w1.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: w1.len(), got: x.len() });
    }
    for (k, a) in x.entries().iter().enumerate() {
        if *a != 0.0 && w0[k].is_infinite() && w1[k].is_infinite() {
            return Err(Error::invalid(format!(
                "coordinate {k} has both weights infinite but x = {a}"
            )));
        }
    }
    Ok(())
}

/// `sum_n |x_n| min(w0_n, t w1_n)`; an infinite weight drops that leg.
pub fn k_weighted_l1_value(x: &WeightedSeq, w0: &[f64], w1: &[f64], t: f64) -> Result<f64> {
    check_weights(x, w0, w1)?;
    Ok(x.entries()
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != 0.0)
        .map(|(k, a)| a.abs() * w0[k].min(t * w1[k]))
        .sum())
}

/// Full K-curve of a weighted-l1 couple, with knots at `w0_n / w1_n`.
pub fn k_exact_weighted_l1(x: &WeightedSeq, w0: &[f64], w1: &[f64]) -> Result<ConcavePL> {
    check_weights(x, w0, w1)?;
    let (mut alpha, mut beta) = (0.0, 0.0);
    let mut atoms = Vec::new();
    for (k, a) in x.entries().iter().enumerate() {
        let a = a.abs();
        if a == 0.0 {
            continue;
        }
        match (w0[k].is_finite(), w1[k].is_finite()) {
            (true, true) => atoms.push((a * w1[k], w0[k] / w1[k])),
            (false, true) => beta += a * w1[k],
            (true, false) => alpha += a * w0[k],
            (false, false) => unreachable!("checked above"),
        }
    }
    Ok(ConcavePL::from_elementary(alpha, beta, &atoms))
}

/// `t -> int_0^t f*`, the K-functional of `(L^1, L^inf)`.
pub fn k_exact_l1_linf(f: &StepFunction) -> ConcavePL {
    let r = decreasing_rearrangement(f);
    let mut knots = vec![(0.0, 0.0)];
    let mut acc = 0.0;
    for (a, b, v) in r.pieces() {
        acc += v * (b - a);
        knots.push((b, acc));
    }
    ConcavePL::hull(&knots, 0.0)
}

/// The K-functional of `(L^inf, L^inf(1/t))`: least concave majorant of `|h|`.
pub fn k_exact_linfty_couple(h: &StepFunction) -> ConcavePL {
    least_concave_majorant(h, None)
}

/// A sequence as a step function with unit pieces, so counting measure on
/// `{1..n}` becomes Lebesgue measure on `(0, n]`.
pub fn seq_as_step(x: &WeightedSeq) -> StepFunction {
    if x.is_empty() {
        return StepFunction::zero();
    }
    let breaks = (0..=x.len()).map(|k| k as f64).collect();
    StepFunction::new(breaks, x.entries().to_vec()).expect("unit grid")
}
