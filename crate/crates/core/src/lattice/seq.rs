use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite real vector. Weights live on the couple, not on the element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightedSeq(Vec<f64>);

impl TryFrom<Vec<f64>> for WeightedSeq {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        WeightedSeq::new(v)
    }
}

impl From<WeightedSeq> for Vec<f64> {
    fn from(s: WeightedSeq) -> Self {
        s.0
    }
}

impl WeightedSeq {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("sequence entries must be finite"));
        }
        Ok(WeightedSeq(entries))
    }

    pub fn zeros(n: usize) -> Self {
        WeightedSeq(vec![0.0; n])
    }

    /// The unit vector `e_k` (zero-based `k`).
    pub fn unit(n: usize, k: usize) -> Self {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        WeightedSeq(v)
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| *x == 0.0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> WeightedSeq {
        WeightedSeq(self.0.iter().map(|x| f(*x)).collect())
    }

    pub fn abs(&self) -> WeightedSeq {
        self.map(f64::abs)
    }

    pub fn scale(&self, lambda: f64) -> WeightedSeq {
        self.map(|x| lambda * x)
    }
}
