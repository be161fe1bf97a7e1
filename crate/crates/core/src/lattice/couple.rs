use serde::{Deserialize, Serialize};

use super::Element;
use crate::error::{Error, Result};
use crate::io::{float_or_inf, opt_vec_float_or_inf, vec_float_or_inf};

/// A pair of lattices `(X_0, X_1)` sharing an ambient space.
///
/// Exponents are in `(0, inf]`; `inf` is written as `"inf"` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum Couple {
    /// `(l^p(w0), l^q(w1))` on a finite index set.
    #[serde(rename = "sequence_lp")]
    SequenceLp {
        #[serde(with = "float_or_inf")]
        p: f64,
        #[serde(with = "float_or_inf")]
        q: f64,
        #[serde(default, with = "opt_vec_float_or_inf", skip_serializing_if = "Option::is_none")]
        w0: Option<Vec<f64>>,
        #[serde(default, with = "opt_vec_float_or_inf", skip_serializing_if = "Option::is_none")]
        w1: Option<Vec<f64>>,
    },
    /// `(L^p, L^q)` on `(0, inf)` with Lebesgue measure.
    #[serde(rename = "function_lp")]
    FunctionLp {
        #[serde(with = "float_or_inf")]
        p: f64,
        #[serde(with = "float_or_inf")]
        q: f64,
    },
    /// `(l^1(w0), l^1(w1))`; an infinite weight removes the coordinate from that leg.
    #[serde(rename = "weighted_l1")]
    WeightedL1 {
        #[serde(with = "vec_float_or_inf")]
        w0: Vec<f64>,
        #[serde(with = "vec_float_or_inf")]
        w1: Vec<f64>,
    },
    /// `(L^inf, L^inf(1/t))`, whose K-functional is the least concave majorant.
    #[serde(rename = "linfty_couple")]
    LinftyCouple,
}

/// One side of a couple, with everything needed to evaluate its quasi-norm.
#[derive(Debug, Clone, PartialEq)]
pub enum Leg {
    /// `l^p` with optional weights: `(sum |x_k w_k|^p)^(1/p)`.
    Lp { p: f64, weights: Option<Vec<f64>> },
    /// `L^p(0, inf)`.
    FunctionLp { p: f64 },
    /// `l^1(w)` with weights in `(0, inf]`.
    WeightedL1 { weights: Vec<f64> },
    /// `L^inf(0, inf)`.
    LInfty,
    /// `L^inf(1/t)`: `sup |h(s)| / s`.
    LInftyInvT,
}

/// A leg norm written over the atoms of a fixed element layout:
/// `(sum_k coef_k y_k^p)^(1/p)` or, for `p = inf`, `max_k coef_k y_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLeg {
    pub p: f64,
    pub coef: Vec<f64>,
}

impl PowerLeg {
    /// Norm of a nonnegative atom vector.
    pub fn norm(&self, y: &[f64]) -> f64 {
        if self.p.is_infinite() {
            y.iter()
                .zip(&self.coef)
                .filter(|(v, _)| **v != 0.0)
                .fold(0.0, |m, (v, c)| m.max(c * v))
        } else {
            self.root(self.power_sum(y))
        }
    }

    pub fn term(&self, k: usize, v: f64) -> f64 {
        if v == 0.0 {
            0.0
        } else if self.p.is_infinite() || self.p == 1.0 {
            self.coef[k] * v
        } else {
            self.coef[k] * v.powf(self.p)
        }
    }

    pub fn power_sum(&self, y: &[f64]) -> f64 {
        (0..y.len()).map(|k| self.term(k, y[k])).sum()
    }

    pub fn root(&self, s: f64) -> f64 {
        if self.p == 1.0 {
            s
        } else if s <= 0.0 {
            0.0
        } else {
            s.powf(1.0 / self.p)
        }
    }
}

impl Couple {
    pub fn sequence(p: f64, q: f64) -> Couple {
        Couple::SequenceLp { p, q, w0: None, w1: None }
    }

    pub fn function(p: f64, q: f64) -> Couple {
        Couple::FunctionLp { p, q }
    }

    pub fn weighted_l1(w0: Vec<f64>, w1: Vec<f64>) -> Result<Couple> {
        let c = Couple::WeightedL1 { w0, w1 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Couple::SequenceLp { p, q, w0, w1 } => {
                check_exponents(*p, *q)?;
                for w in [w0, w1].into_iter().flatten() {
                    if w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                        return Err(Error::invalid("sequence weights must be positive and finite"));
                    }
                }
                if let (Some(a), Some(b)) = (w0, w1) {
                    if a.len() != b.len() {
                        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
                    }
                }
                Ok(())
            }
            Couple::FunctionLp { p, q } => check_exponents(*p, *q),
            Couple::WeightedL1 { w0, w1 } => {
                if w0.len() != w1.len() {
                    return Err(Error::DimensionMismatch { expected: w0.len(), got: w1.len() });
                }
                if w0.iter().chain(w1).any(|x| x.is_nan() || *x <= 0.0) {
                    return Err(Error::invalid("weighted l1 weights must lie in (0, inf]"));
                }
                Ok(())
            }
            Couple::LinftyCouple => Ok(()),
        }
    }

    /// Fixed dimension required of sequence elements, if any.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            Couple::SequenceLp { w0, w1, .. } => w0.as_ref().or(w1.as_ref()).map(Vec::len),
            Couple::WeightedL1 { w0, .. } => Some(w0.len()),
            _ => None,
        }
    }

    pub fn is_sequence(&self) -> bool {
        matches!(self, Couple::SequenceLp { .. } | Couple::WeightedL1 { .. })
    }

    /// Checks that `x` lives in the ambient space of this couple.
    pub fn check_element(&self, x: &Element) -> Result<()> {
        match (self.is_sequence(), x) {
            (true, Element::Seq(s)) => match self.dimension() {
                Some(n) if n != s.len() => Err(Error::DimensionMismatch { expected: n, got: s.len() }),
                _ => Ok(()),
            },
            (false, Element::Step(_)) => Ok(()),
            (true, _) => Err(Error::invalid("this couple needs a sequence element")),
            (false, _) => Err(Error::invalid("this couple needs a step-function element")),
        }
    }

    pub fn legs(&self) -> (Leg, Leg) {
        match self {
            Couple::SequenceLp { p, q, w0, w1 } => (
                Leg::Lp { p: *p, weights: w0.clone() },
                Leg::Lp { p: *q, weights: w1.clone() },
            ),
            Couple::FunctionLp { p, q } => (Leg::FunctionLp { p: *p }, Leg::FunctionLp { p: *q }),
            Couple::WeightedL1 { w0, w1 } => (
                Leg::WeightedL1 { weights: w0.clone() },
                Leg::WeightedL1 { weights: w1.clone() },
            ),
            Couple::LinftyCouple => (Leg::LInfty, Leg::LInftyInvT),
        }
    }

    pub fn leg(&self, i: usize) -> Leg {
        let (a, b) = self.legs();
        if i == 0 {
            a
        } else {
            b
        }
    }
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    for e in [p, q] {
        if e.is_nan() || e <= 0.0 {
            return Err(Error::NonPositiveExponent(e));
        }
    }
    if p > q {
        return Err(Error::invalid(format!(
            "couple exponents must satisfy p <= q (got p = {p}, q = {q})"
        )));
    }
    Ok(())
}

impl Leg {
    pub fn exponent(&self) -> f64 {
        match self {
            Leg::Lp { p, .. } | Leg::FunctionLp { p } => *p,
            Leg::WeightedL1 { .. } => 1.0,
            Leg::LInfty | Leg::LInftyInvT => f64::INFINITY,
        }
    }

    /// Plain unweighted `l^p`.
    pub fn lp(p: f64) -> Leg {
        Leg::Lp { p, weights: None }
    }

    /// The leg norm expressed over the atoms of `x`'s layout.
    pub fn power_leg(&self, x: &Element) -> Result<PowerLeg> {
        let p = self.exponent();
        if p.is_nan() || p <= 0.0 {
            return Err(Error::NonPositiveExponent(p));
        }
        let coef = match (self, x) {
            (Leg::Lp { weights, .. }, Element::Seq(s)) => match weights {
                None => vec![1.0; s.len()],
                Some(w) => {
                    if w.len() != s.len() {
                        return Err(Error::DimensionMismatch { expected: w.len(), got: s.len() });
                    }
                    if p.is_infinite() {
                        w.clone()
                    } else {
                        w.iter().map(|v| v.powf(p)).collect()
                    }
                }
            },
            (Leg::WeightedL1 { weights }, Element::Seq(s)) => {
                if weights.len() != s.len() {
                    return Err(Error::DimensionMismatch { expected: weights.len(), got: s.len() });
                }
                weights.clone()
            }
            (Leg::FunctionLp { .. }, Element::Step(f)) => {
                if p.is_infinite() {
                    vec![1.0; f.num_pieces()]
                } else {
                    f.lengths()
                }
            }
            (Leg::LInfty, Element::Step(f)) => vec![1.0; f.num_pieces()],
            (Leg::LInftyInvT, Element::Step(f)) => f
                .pieces()
                .map(|(a, _, _)| if a == 0.0 { f64::INFINITY } else { 1.0 / a })
                .collect(),
            _ => {
                return Err(Error::invalid(
                    "element kind does not match the leg (sequence vs step function)",
                ))
            }
        };
        Ok(PowerLeg { p, coef })
    }

    pub fn norm(&self, x: &Element) -> Result<f64> {
        let pl = self.power_leg(x)?;
        let a: Vec<f64> = x.values().iter().map(|v| v.abs()).collect();
        Ok(pl.norm(&a))
    }
}

/// Quasi-norm of `x` in one leg of a couple.
pub fn quasi_norm(x: &Element, leg: &Leg) -> Result<f64> {
    leg.norm(x)
}

/// Best constant in `||x + y|| <= C (||x|| + ||y||)` for `l^p` and `L^p`.
pub fn quasi_triangle_constant(p: f64) -> f64 {
    1f64.max(2f64.powf((1.0 - p) / p))
}
