use serde::Serialize;

use crate::error::{Error, Result};
use crate::kfunctional::{k_value, DEFAULT_ACCURACY};
use crate::lattice::{Couple, Element, Leg};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonCmRow {
    pub n: usize,
    /// `||x_n||_{l^p} / ||x_n||_{l^1}`, which is `n^(1/p - 1)`.
    pub ratio_lp_l1: f64,
    /// `sup_t K(t, x_n; l^p, l^q)`.
    pub sup_k: f64,
}

/// `sup_t` of a concave nondecreasing curve: doubling `t` until the value
/// stops growing, since `K(2t) = K(t)` forces `K` to be constant after `t`.
fn sup_k(x: &Element, c: &Couple) -> Result<f64> {
    let mut t = 1.0;
    let mut v = k_value(x, c, t, DEFAULT_ACCURACY)?;
    for _ in 0..200 {
        let w = k_value(x, c, 2.0 * t, DEFAULT_ACCURACY)?;
        if w <= v * (1.0 + 1e-14) {
            return Ok(v.max(w));
        }
        t *= 2.0;
        v = w;
    }
    Err(Error::Numeric("K-functional did not saturate".into()))
}

/// Rows for `x_n = (1, .., 1, 0, ..) / n`, `n = 1..=n_max`.
pub fn non_cm_demo(p: f64, q: f64, n_max: usize) -> Result<Vec<NonCmRow>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("the demo needs 0 < p < 1, got {p}")));
    }
    if !(q > p) {
        return Err(Error::invalid(format!("need q > p, got p = {p}, q = {q}")));
    }
    if n_max == 0 {
        return Err(Error::invalid("n_max must be positive"));
    }
    let c = Couple::sequence(p, q);
    let (lp, l1) = (Leg::lp(p), Leg::lp(1.0));
    (1..=n_max)
        .map(|n| {
            let x = Element::seq(vec![1.0 / n as f64; n])?;
            Ok(NonCmRow { n, ratio_lp_l1: lp.norm(&x)? / l1.norm(&x)?, sup_k: sup_k(&x, &c)? })
        })
        .collect()
}
