//! Constructive decompositions driven by K-functional majorants.

mod atoms;
mod fundamental;
mod kdivide;
mod pdivide;

pub use fundamental::{fundamental_split, Block, FundamentalAudit, FundamentalSplit, DEFAULT_EPSILON, FUNDAMENTAL_BOUND};
pub use kdivide::{k_divide, k_divide_eps, k_divide_gamma, DivisibilityCertificate, BAND, HYPOTHESIS_TOL, TRANSFER_BOUND};
pub use pdivide::{p_k_divide, p_k_divide_eps, p_k_divide_gamma};

use crate::error::{Error, Result};
use crate::lattice::{align, Element};

/// Greedy Riesz decomposition: given `0 <= y <= y_1 + .. + y_m` with `y_n >= 0`,
/// returns `0 <= z_n <= y_n` with `z_1 + .. + z_m = y`.
pub fn riesz_decompose(y: &Element, parts: &[Element]) -> Result<Vec<Element>> {
    if parts.is_empty() {
        return Err(Error::invalid("need at least one part"));
    }
    let mut all = vec![y];
    all.extend(parts.iter());
    let (layout, vals) = align(&all)?;
    let (yv, pv) = (&vals[0], &vals[1..]);
    for k in 0..layout.len() {
        if yv[k] < 0.0 || pv.iter().any(|p| p[k] < 0.0) {
            return Err(Error::invalid(format!("negative value at atom {k}")));
        }
        let s: f64 = pv.iter().map(|p| p[k]).sum();
        if yv[k] > s * (1.0 + 1e-12) {
            return Err(Error::invalid(format!("y exceeds the sum of parts at atom {k}: {} > {s}", yv[k])));
        }
    }
    let mut rest = yv.clone();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(pv.len());
    for p in pv {
        let z: Vec<f64> = rest.iter().zip(p).map(|(r, q)| r.min(*q)).collect();
        rest.iter_mut().zip(&z).for_each(|(r, zz)| *r = if *r == *zz { 0.0 } else { *r - zz });
        out.push(z);
    }
    // rounding leftovers from y slightly above the sum
    if let Some(last) = out.last_mut() {
        last.iter_mut().zip(&rest).for_each(|(z, r)| *z += r);
    }
    Ok(out.into_iter().map(|v| layout.build(v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_fill() {
        let y = Element::seq(vec![1.0, 1.0]).unwrap();
        let z = riesz_decompose(
            &y,
            &[Element::seq(vec![2.0, 0.0]).unwrap(), Element::seq(vec![0.0, 2.0]).unwrap()],
        )
        .unwrap();
        assert_eq!(z, vec![Element::seq(vec![1.0, 0.0]).unwrap(), Element::seq(vec![0.0, 1.0]).unwrap()]);
        assert_eq!(riesz_decompose(&y, &[y.clone()]).unwrap(), vec![y.clone()]);
    }

    #[test]
    fn rejects_bad_input() {
        let y = Element::seq(vec![1.0, 1.0]).unwrap();
        assert!(riesz_decompose(&y, &[Element::seq(vec![0.5, 1.0]).unwrap()]).is_err());
        assert!(riesz_decompose(&y, &[Element::seq(vec![-1.0, 3.0]).unwrap()]).is_err());
    }
}
