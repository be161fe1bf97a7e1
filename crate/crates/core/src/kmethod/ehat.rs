//! Upper bounds for the cover norm
//! `inf { (sum ||x_i||_X^q)^(1/q) : f(t) <= (sum K(t, x_i)^p)^(1/p) }`.
//!
//! Covers are drawn from a dictionary that depends only on the couple (never
//! on `f`), so concatenating covers of `f` and `g` gives a cover of `f + g`
//! that the search can see.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::DyadicGrid;
use crate::io::float_or_inf;
use crate::kfunctional::{k_curve, DEFAULT_ACCURACY};
use crate::lattice::{ConcavePL, Couple, Element, Leg};
use crate::lp::{Cmp, LinearProgram, LpStatus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseSpace {
    /// One of the couple's own legs.
    Leg { index: usize },
    /// `l^p` (sequences) or `L^p` (functions).
    Lp {
        #[serde(with = "float_or_inf")]
        p: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EHatNorm {
    pub couple: Couple,
    pub base: BaseSpace,
    pub p: f64,
    pub q: f64,
    /// Simplex pivot budget for the cover search.
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default)]
    pub grid: DyadicGrid,
    /// Dimension for sequence couples without weights.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    /// Extra dictionary elements, used for every `f`.
    #[serde(default)]
    pub extras: Vec<Element>,
}

fn default_budget() -> usize {
    20_000
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverTerm {
    pub element: Element,
    pub coefficient: f64,
    /// `||coefficient * element||_X`.
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EHatValue {
    #[serde(with = "float_or_inf")]
    pub value: f64,
    pub cover: Vec<CoverTerm>,
    pub dictionary_size: usize,
}

impl EHatNorm {
    pub fn new(couple: Couple, base: BaseSpace, p: f64, q: f64) -> Self {
        EHatNorm { couple, base, p, q, budget: default_budget(), grid: DyadicGrid::default(), dimension: None, extras: vec![] }
    }

    pub fn validate(&self) -> Result<()> {
        self.couple.validate()?;
        self.grid.validate()?;
        if !(self.q > 0.0 && self.q <= self.p && self.p <= 1.0) {
            return Err(Error::invalid(format!("need 0 < q <= p <= 1, got p = {}, q = {}", self.p, self.q)));
        }
        self.base_leg().map(|_| ())
    }

    pub fn base_leg(&self) -> Result<Leg> {
        match &self.base {
            BaseSpace::Leg { index } if *index < 2 => Ok(self.couple.leg(*index)),
            BaseSpace::Leg { index } => Err(Error::invalid(format!("leg index {index} out of range"))),
            BaseSpace::Lp { p } if *p > 0.0 => Ok(if self.couple.is_sequence() {
                Leg::lp(*p)
            } else {
                Leg::FunctionLp { p: *p }
            }),
            BaseSpace::Lp { p } => Err(Error::NonPositiveExponent(*p)),
        }
    }

    /// Basis vectors and initial blocks `1_[1..m]` for sequences, indicators
    /// of `(0, 2^k]` for functions, then the extras; duplicates removed.
    pub fn dictionary(&self) -> Result<Vec<Element>> {
        let mut out: Vec<Element> = Vec::new();
        match self.couple.dimension().or(self.dimension.filter(|_| self.couple.is_sequence())) {
            Some(n) => {
                for k in 0..n {
                    let mut v = vec![0.0; n];
                    v[k] = 1.0;
                    out.push(Element::seq(v)?);
                }
                for m in 2..=n {
                    let v: Vec<f64> = (0..n).map(|k| if k < m { 1.0 } else { 0.0 }).collect();
                    out.push(Element::seq(v)?);
                }
            }
            None if self.couple.is_sequence() => {
                return Err(Error::Unsupported("cover dictionary needs a couple with fixed dimension".into()))
            }
            None => {
                for k in -8..=8 {
                    out.push(Element::step(vec![0.0, 2f64.powi(k)], vec![1.0])?);
                }
            }
        }
        for e in &self.extras {
            self.couple.check_element(e)?;
            if !e.is_zero() {
                out.push(e.abs());
            }
        }
        let mut uniq: Vec<Element> = Vec::with_capacity(out.len());
        for e in out {
            if !uniq.contains(&e) {
                uniq.push(e);
            }
        }
        if uniq.is_empty() {
            return Err(Error::invalid("empty cover dictionary"));
        }
        Ok(uniq)
    }
}

/// Best cover found for `f`; `inf` when no cover from the dictionary
/// dominates `f` on the grid.
pub fn e_hat_upper(f: &ConcavePL, cfg: &EHatNorm) -> Result<EHatValue> {
    cfg.validate()?;
    let dict = cfg.dictionary()?;
    let leg = cfg.base_leg()?;
    let ts = cfg.grid.points();
    let fv: Vec<f64> = ts.iter().map(|t| f.eval(*t)).collect();
    if fv.iter().all(|v| *v == 0.0) {
        return Ok(EHatValue { value: 0.0, cover: vec![], dictionary_size: dict.len() });
    }
    let (p, q) = (cfg.p, cfg.q);

    let mut kappa: Vec<Vec<f64>> = Vec::new();
    let mut nu: Vec<f64> = Vec::new();
    let mut elems: Vec<&Element> = Vec::new();
    for d in &dict {
        let n = leg.norm(d)?;
        if !(n > 0.0 && n.is_finite()) {
            continue;
        }
        let kc = k_curve(d, &cfg.couple, &cfg.grid, DEFAULT_ACCURACY)?;
        kappa.push(ts.iter().map(|t| kc.eval(*t)).collect());
        nu.push(n);
        elems.push(d);
    }
    let active: Vec<usize> = (0..ts.len()).filter(|i| fv[*i] > 0.0).collect();
    let ratio = |j: usize, i: usize| (kappa[j][i] / fv[i]).powf(p);
    let objective = |mu: &[f64]| -> f64 {
        mu.iter().zip(&nu).map(|(m, n)| m.powf(q / p) * n.powf(q)).sum::<f64>().powf(1.0 / q)
    };

    // best single-element cover
    let mut best: Option<(f64, Vec<f64>)> = None;
    for j in 0..nu.len() {
        let need = active.iter().map(|i| 1.0 / ratio(j, *i)).fold(0.0, f64::max);
        if need.is_finite() {
            let mut mu = vec![0.0; nu.len()];
            mu[j] = need;
            let v = objective(&mu);
            if best.as_ref().map_or(true, |b| v < b.0) {
                best = Some((v, mu));
            }
        }
    }

    let mut lp = LinearProgram::<f64>::new(nu.len());
    lp.objective = nu.iter().map(|n| n.powf(p)).collect();
    for i in &active {
        lp.add_row((0..nu.len()).map(|j| ratio(j, *i)).collect(), Cmp::Ge, 1.0);
    }
    let sol = lp.solve(cfg.budget);
    if sol.status == LpStatus::Optimal {
        let mut mu: Vec<f64> = sol.x.iter().map(|v| v.max(0.0)).collect();
        // rescale so the cover holds exactly despite pivot round-off
        let worst = active
            .iter()
            .map(|i| 1.0 / (0..nu.len()).map(|j| mu[j] * ratio(j, *i)).sum::<f64>())
            .fold(0.0, f64::max);
        if worst > 1.0 {
            mu.iter_mut().for_each(|m| *m *= worst);
        }
        let v = objective(&mu);
        if best.as_ref().map_or(true, |b| v <= b.0) {
            best = Some((v, mu));
        }
    }
    Ok(match best {
        None => EHatValue { value: f64::INFINITY, cover: vec![], dictionary_size: dict.len() },
        Some((value, mu)) => {
            let cover = mu
                .iter()
                .enumerate()
                .filter(|(_, m)| **m > 0.0)
                .map(|(j, m)| {
                    let c = m.powf(1.0 / p);
                    CoverTerm { element: elems[j].scale(c), coefficient: c, norm: c * nu[j] }
                })
                .collect();
            EHatValue { value, cover, dictionary_size: dict.len() }
        }
    })
}
