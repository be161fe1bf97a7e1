//! The p-convexification `X^(p)`: same elements, operations
//! `x (+) y = (x^(1/p) + y^(1/p))^p`, `a (.) x = a^p x` and
//! norm `|||x||| = ||x||^(1/p)`. Powers are taken sign-preserving.

use super::{Couple, Element, Leg};
use crate::error::{Error, Result};

pub fn signed_pow(v: f64, e: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else if e == 1.0 {
        v
    } else {
        v.signum() * v.abs().powf(e)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p <= 0.0 || p.is_infinite() {
        return Err(Error::NonPositiveExponent(p));
    }
    Ok(())
}

/// `x` viewed in `X^(p)`, together with its norm there.
#[derive(Debug, Clone, PartialEq)]
pub struct Convexified {
    pub element: Element,
    pub norm: f64,
}

pub fn convexify_element(x: &Element, p: f64, leg: &Leg) -> Result<Convexified> {
    check_p(p)?;
    let n = leg.norm(x)?;
    Ok(Convexified { element: x.clone(), norm: n.powf(1.0 / p) })
}

pub fn oplus(x: &Element, y: &Element, p: f64) -> Result<Element> {
    check_p(p)?;
    x.zip_with(y, |a, b| signed_pow(signed_pow(a, 1.0 / p) + signed_pow(b, 1.0 / p), p))
}

pub fn odot(alpha: f64, x: &Element, p: f64) -> Result<Element> {
    check_p(p)?;
    Ok(x.scale(signed_pow(alpha, p)))
}

/// Pointwise `sign(x) |x|^e`.
pub fn power_map(x: &Element, e: f64) -> Element {
    x.map(|v| signed_pow(v, e))
}

/// A concrete leg isometric to `X^(1/p)` under `u = |x|^p`:
/// `||u||_new = ||u^(1/p)||_X^p`.
pub fn power_leg(leg: &Leg, p: f64) -> Result<Leg> {
    check_p(p)?;
    match leg {
        Leg::Lp { p: r, weights } => Ok(Leg::Lp {
            p: r / p,
            weights: weights.as_ref().map(|w| w.iter().map(|v| v.powf(p)).collect()),
        }),
        Leg::FunctionLp { p: r } => Ok(Leg::FunctionLp { p: r / p }),
        Leg::LInfty => Ok(Leg::LInfty),
        Leg::WeightedL1 { weights } if p == 1.0 => Ok(Leg::WeightedL1 { weights: weights.clone() }),
        _ => Err(Error::Unsupported(format!("no concrete {p}-power of leg {leg:?}"))),
    }
}

/// The couple realizing `(X_0^(1/p), X_1^(1/p))` on `u = |x|^p`.
///
/// Weighted `(l^r(w0), l^r(w1))` legs with `r = p` become a weighted-l1 couple.
pub fn power_couple(c: &Couple, p: f64) -> Result<Couple> {
    check_p(p)?;
    if p == 1.0 {
        return Ok(c.clone());
    }
    match c {
        Couple::SequenceLp { p: r0, q: r1, w0, w1 } => {
            let pw = |w: &Option<Vec<f64>>| w.as_ref().map(|w| w.iter().map(|v| v.powf(p)).collect::<Vec<f64>>());
            Ok(Couple::SequenceLp { p: r0 / p, q: r1 / p, w0: pw(w0), w1: pw(w1) })
        }
        Couple::FunctionLp { p: r0, q: r1 } => Ok(Couple::FunctionLp { p: r0 / p, q: r1 / p }),
        _ => Err(Error::Unsupported(format!("no concrete {p}-power of couple {c:?}"))),
    }
}
