use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{ConcavePL, Couple, WeightedSeq};

/// An element of the dyadic weighted-l1 couple realizing a concave curve:
/// `K(t) = alpha + beta t + sum_n b_n min(1, t 2^-n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicElement {
    pub alpha: f64,
    pub beta: f64,
    pub n_min: i32,
    /// `b_n` for `n = n_min ..= n_min + coeffs.len() - 1`.
    pub coeffs: Vec<f64>,
}

impl DyadicElement {
    pub fn n_max(&self) -> i32 {
        self.n_min + self.coeffs.len() as i32 - 1
    }

    pub fn k_curve(&self) -> ConcavePL {
        let atoms: Vec<(f64, f64)> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let s = 2f64.powi(self.n_min + i as i32);
                (b / s, s)
            })
            .collect();
        ConcavePL::from_elementary(self.alpha, self.beta, &atoms)
    }

    /// Entries ordered `[-inf atom, b_n_min, .., b_n_max, +inf atom]`.
    pub fn entries(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.coeffs.len() + 2);
        v.push(self.alpha);
        v.extend_from_slice(&self.coeffs);
        v.push(self.beta);
        v
    }

    pub fn to_seq(&self) -> WeightedSeq {
        WeightedSeq::new(self.entries()).expect("finite coefficients")
    }

    /// `(l^1, l^1(2^-n))` on the same index set, with the `-inf` atom living
    /// only in the first leg and the `+inf` atom only in the second.
    pub fn couple(&self) -> Couple {
        let (w0, w1) = dyadic_weights(self.n_min, self.n_max());
        Couple::WeightedL1 { w0, w1 }
    }
}

pub fn dyadic_weights(n_min: i32, n_max: i32) -> (Vec<f64>, Vec<f64>) {
    let mut w0 = vec![1.0];
    let mut w1 = vec![f64::INFINITY];
    for n in n_min..=n_max {
        w0.push(1.0);
        w1.push(2f64.powi(-n));
    }
    w0.push(f64::INFINITY);
    w1.push(1.0);
    (w0, w1)
}

/// Dyadic range covering every interior knot of `phi` with one octave to spare.
pub fn dyadic_range(phi: &ConcavePL) -> (i32, i32) {
    let ts: Vec<f64> = phi.knot_ts().filter(|t| *t > 0.0).collect();
    if ts.is_empty() {
        return (0, 0);
    }
    let lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ts.iter().copied().fold(0.0, f64::max);
    (lo.log2().floor() as i32 - 1, hi.log2().ceil() as i32 + 1)
}

/// Splits `phi = alpha + beta t + phi_0` and writes `phi_0` through its
/// dyadic slope drops: `b_n = 2^n (s_{n-1} - s_n)` with `s_n` the chord
/// slope of `phi_0` on `[2^n, 2^(n+1)]`.
///
/// The reconstruction interpolates `phi_0` at every power of two in range,
/// so it lies within a factor 2 of `phi` whenever the range covers all
/// knots (see [`dyadic_range`]).
pub fn conv_to_element(phi: &ConcavePL, range: Option<(i32, i32)>) -> Result<DyadicElement> {
    let slack = phi.slack();
    if slack < -crate::lattice::VALIDATE_TOL {
        return Err(Error::NotConcave(format!("slack {slack:e}")));
    }
    let (n_min, n_max) = range.unwrap_or_else(|| dyadic_range(phi));
    if n_min > n_max {
        return Err(Error::invalid("empty dyadic range"));
    }
    let alpha = phi.value_at_zero();
    let beta = phi.tail_slope();
    let phi0 = |t: f64| (phi.eval(t) - alpha - beta * t).max(0.0);
    let pw = |n: i32| 2f64.powi(n);
    // s[i] is the slope for index n_min - 1 + i
    let mut s = Vec::with_capacity((n_max - n_min + 2) as usize);
    s.push(phi0(pw(n_min)) / pw(n_min));
    for n in n_min..n_max {
        s.push((phi0(pw(n + 1)) - phi0(pw(n))) / pw(n));
    }
    s.push(0.0);
    let coeffs = (n_min..=n_max)
        .enumerate()
        .map(|(i, n)| (pw(n) * (s[i] - s[i + 1])).max(0.0))
        .collect();
    Ok(DyadicElement { alpha, beta, n_min, coeffs })
}

/// `(min, max)` of `phi / K(., b)` over `t > 0`.
pub fn equivalence_band(phi: &ConcavePL, b: &DyadicElement) -> (f64, f64) {
    let g = b.k_curve();
    let hi = phi.sup_ratio(&g).value;
    let lo = g.sup_ratio(phi).value;
    (if lo > 0.0 { 1.0 / lo } else { f64::INFINITY }, hi)
}
