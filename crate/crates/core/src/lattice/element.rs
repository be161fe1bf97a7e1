use serde::{Deserialize, Serialize};

use super::{StepFunction, WeightedSeq};
use crate::error::{Error, Result};

/// A concrete lattice element: a finite sequence or a step function on `(0, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Element {
    Seq(WeightedSeq),
    Step(StepFunction),
}

/// Shared coordinate system for pointwise work on several elements.
///
/// A sequence of length `n` has `n` atoms of measure one; a step function
/// grid has one atom per piece, with the piece length as its measure.
#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    Seq(usize),
    Step(Vec<f64>),
}

impl Layout {
    pub fn len(&self) -> usize {
        match self {
            Layout::Seq(n) => *n,
            Layout::Step(b) => b.len().saturating_sub(1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn measures(&self) -> Vec<f64> {
        match self {
            Layout::Seq(n) => vec![1.0; *n],
            Layout::Step(b) => b.windows(2).map(|w| w[1] - w[0]).collect(),
        }
    }

    pub fn build(&self, values: Vec<f64>) -> Element {
        debug_assert_eq!(values.len(), self.len());
        match self {
            Layout::Seq(_) => Element::Seq(WeightedSeq::new(values).expect("finite values")),
            Layout::Step(b) => {
                if b.is_empty() {
                    Element::Step(StepFunction::zero())
                } else {
                    Element::Step(StepFunction::new(b.clone(), values).expect("valid grid"))
                }
            }
        }
    }
}

impl Element {
    pub fn seq(v: Vec<f64>) -> Result<Element> {
        Ok(Element::Seq(WeightedSeq::new(v)?))
    }

    pub fn step(breaks: Vec<f64>, values: Vec<f64>) -> Result<Element> {
        Ok(Element::Step(StepFunction::new(breaks, values)?))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Element::Seq(s) => s.is_zero(),
            Element::Step(f) => f.is_zero(),
        }
    }

    /// Number of atoms (coordinates or pieces).
    pub fn len(&self) -> usize {
        match self {
            Element::Seq(s) => s.len(),
            Element::Step(f) => f.num_pieces(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn layout(&self) -> Layout {
        match self {
            Element::Seq(s) => Layout::Seq(s.len()),
            Element::Step(f) => Layout::Step(f.breaks().to_vec()),
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            Element::Seq(s) => s.entries(),
            Element::Step(f) => f.values(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Element {
        match self {
            Element::Seq(s) => Element::Seq(s.map(f)),
            Element::Step(g) => Element::Step(g.map_values(f)),
        }
    }

    pub fn abs(&self) -> Element {
        self.map(f64::abs)
    }

    pub fn scale(&self, lambda: f64) -> Element {
        self.map(|v| lambda * v)
    }

    pub fn zero_like(&self) -> Element {
        self.map(|_| 0.0)
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn zip_with(&self, other: &Element, f: impl Fn(f64, f64) -> f64) -> Result<Element> {
        let (layout, vals) = align(&[self, other])?;
        let out = vals[0].iter().zip(&vals[1]).map(|(a, b)| f(*a, *b)).collect();
        Ok(layout.build(out))
    }

    /// Largest pointwise absolute difference, after aligning grids.
    pub fn max_abs_diff(&self, other: &Element) -> Result<f64> {
        let (_, vals) = align(&[self, other])?;
        Ok(vals[0]
            .iter()
            .zip(&vals[1])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Brings elements of the same kind onto a common atom grid.
pub fn align(elems: &[&Element]) -> Result<(Layout, Vec<Vec<f64>>)> {
    let Some(first) = elems.first() else {
        return Err(Error::invalid("nothing to align"));
    };
    match first {
        Element::Seq(s0) => {
            let n = s0.len();
            let mut out = Vec::with_capacity(elems.len());
            for e in elems {
                match e {
                    Element::Seq(s) if s.len() == n => out.push(s.entries().to_vec()),
                    Element::Seq(s) => {
                        return Err(Error::DimensionMismatch { expected: n, got: s.len() })
                    }
                    Element::Step(_) => {
                        return Err(Error::invalid("cannot mix sequences and step functions"))
                    }
                }
            }
            Ok((Layout::Seq(n), out))
        }
        Element::Step(_) => {
            let mut fs = Vec::with_capacity(elems.len());
            for e in elems {
                match e {
                    Element::Step(f) => fs.push(f),
                    Element::Seq(_) => {
                        return Err(Error::invalid("cannot mix sequences and step functions"))
                    }
                }
            }
            let grid = StepFunction::common_breaks(&fs);
            let out = fs.iter().map(|f| f.values_on(&grid)).collect();
            Ok((Layout::Step(grid), out))
        }
    }
}
