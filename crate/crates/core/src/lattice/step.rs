use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A step function on `(0, inf)`: value `values[i]` on
/// `(breaks[i], breaks[i + 1]]` and zero outside `(breaks[0], breaks[m]]`.
///
/// `breaks[0]` may be `0`; all other breakpoints are finite and positive.
/// The zero function may also be written with no pieces at all.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStep", into = "RawStep")]
pub struct StepFunction {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStep {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawStep> for StepFunction {
    type Error = Error;
    fn try_from(r: RawStep) -> Result<Self> {
        StepFunction::new(r.breaks, r.values)
    }
}

impl From<StepFunction> for RawStep {
    fn from(s: StepFunction) -> Self {
        RawStep { breaks: s.breaks, values: s.values }
    }
}

impl StepFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.is_empty() && values.is_empty() {
            return Ok(StepFunction { breaks, values });
        }
        if breaks.len() != values.len() + 1 {
            return Err(Error::invalid(format!(
                "step function needs one more breakpoint than values ({} vs {})",
                breaks.len(),
                values.len()
            )));
        }
        if values.is_empty() {
            return Err(Error::invalid("step function has a breakpoint but no pieces"));
        }
        if !(breaks[0] >= 0.0) {
            return Err(Error::invalid("first breakpoint must be >= 0"));
        }
        for w in breaks.windows(2) {
            if !(w[0] < w[1]) || !w[1].is_finite() {
                return Err(Error::invalid(
                    "breakpoints must be finite and strictly increasing",
                ));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("step values must be finite"));
        }
        Ok(StepFunction { breaks, values })
    }

    pub fn zero() -> Self {
        StepFunction { breaks: Vec::new(), values: Vec::new() }
    }

    /// `c` on `(a, b]`.
    pub fn constant_on(a: f64, b: f64, c: f64) -> Result<Self> {
        StepFunction::new(vec![a, b], vec![c])
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn num_pieces(&self) -> usize {
        self.values.len()
    }

    /// `(left, right, value)` per piece.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.breaks[i], self.breaks[i + 1], *v))
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.breaks.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.values.is_empty() || t <= self.breaks[0] || t > *self.breaks.last().unwrap() {
            return 0.0;
        }
        // first index with breaks[i] >= t; the piece is i - 1
        let i = self.breaks.partition_point(|b| *b < t);
        self.values[i - 1]
    }

    pub fn support_measure(&self) -> f64 {
        self.pieces().filter(|p| p.2 != 0.0).map(|p| p.1 - p.0).sum()
    }

    /// Measure of `{ |f| > level }`.
    pub fn level_measure(&self, level: f64) -> f64 {
        self.pieces().filter(|p| p.2.abs() > level).map(|p| p.1 - p.0).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> StepFunction {
        StepFunction {
            breaks: self.breaks.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn abs(&self) -> StepFunction {
        self.map_values(f64::abs)
    }

    pub fn scale(&self, lambda: f64) -> StepFunction {
        self.map_values(|v| lambda * v)
    }

    /// Merges adjacent equal values and trims zero pieces at either end.
    pub fn canonical(&self) -> StepFunction {
        let mut breaks: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        for (a, b, v) in self.pieces() {
            match values.last() {
                Some(last) if *last == v && *breaks.last().unwrap() == a => {
                    *breaks.last_mut().unwrap() = b;
                }
                _ => {
                    if breaks.last() != Some(&a) {
                        if !breaks.is_empty() {
                            // gap between pieces is an explicit zero
                            values.push(0.0);
                        }
                        breaks.push(a);
                    }
                    values.push(v);
                    breaks.push(b);
                }
            }
        }
        while values.last() == Some(&0.0) {
            values.pop();
            breaks.pop();
        }
        while values.first() == Some(&0.0) {
            values.remove(0);
            breaks.remove(0);
        }
        if values.is_empty() {
            return StepFunction::zero();
        }
        StepFunction { breaks, values }
    }

    /// Values of `self` on the pieces of a finer breakpoint grid.
    pub fn values_on(&self, grid: &[f64]) -> Vec<f64> {
        grid.windows(2).map(|w| self.eval(0.5 * (w[0] + w[1]))).collect()
    }

    /// Union of the breakpoint sets of several step functions.
    pub fn common_breaks(fs: &[&StepFunction]) -> Vec<f64> {
        let mut all: Vec<f64> = fs.iter().flat_map(|f| f.breaks.iter().copied()).collect();
        all.sort_by(f64::total_cmp);
        all.dedup();
        all
    }
}
