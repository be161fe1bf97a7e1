use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance below which adjacent chord slopes count as equal.
pub const MERGE_TOL: f64 = 1e-12;
/// Relative slack allowed by [`ConcavePL::new`].
pub const VALIDATE_TOL: f64 = 1e-9;

/// A concave, nondecreasing, nonnegative piecewise-linear function on `[0, inf)`.
///
/// Knots start at `t = 0`. The first ordinate is the limit at `0+` and may be
/// positive, which lets constants like `phi = 1` be represented; the curve is
/// continued past the last knot with `tail_slope`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConcave", into = "RawConcave")]
pub struct ConcavePL {
    knots: Vec<(f64, f64)>,
    tail_slope: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConcave {
    knots: Vec<[f64; 2]>,
    tail_slope: f64,
}

impl TryFrom<RawConcave> for ConcavePL {
    type Error = Error;
    fn try_from(r: RawConcave) -> Result<Self> {
        ConcavePL::new(r.knots.into_iter().map(|k| (k[0], k[1])).collect(), r.tail_slope)
    }
}

impl From<ConcavePL> for RawConcave {
    fn from(c: ConcavePL) -> Self {
        RawConcave { knots: c.knots.iter().map(|k| [k.0, k.1]).collect(), tail_slope: c.tail_slope }
    }
}

/// Where a supremum of a ratio is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSup {
    pub value: f64,
    /// `0` and `inf` stand for the limits at `0+` and at infinity.
    pub at: f64,
}

impl ConcavePL {
    /// Validates (relative slack [`VALIDATE_TOL`]) and canonicalizes.
    pub fn new(knots: Vec<(f64, f64)>, tail_slope: f64) -> Result<Self> {
        let c = ConcavePL { knots, tail_slope };
        c.check_shape()?;
        let slack = c.slack();
        if slack < -VALIDATE_TOL {
            return Err(Error::NotConcave(format!("slack {slack:e} below -{VALIDATE_TOL:e}")));
        }
        Ok(c.canonical())
    }

    pub fn zero() -> Self {
        ConcavePL { knots: vec![(0.0, 0.0)], tail_slope: 0.0 }
    }

    /// `t -> slope * t`.
    pub fn linear(slope: f64) -> Self {
        assert!(slope >= 0.0 && slope.is_finite());
        ConcavePL { knots: vec![(0.0, 0.0)], tail_slope: slope }
    }

    /// `t -> c` on `(0, inf)`.
    pub fn constant(c: f64) -> Self {
        assert!(c >= 0.0 && c.is_finite());
        ConcavePL { knots: vec![(0.0, c)], tail_slope: 0.0 }
    }

    /// `t -> a * min(1, t / tau)`, i.e. slope `a / tau` up to `tau`.
    pub fn min_ramp(a: f64, tau: f64) -> Self {
        ConcavePL::from_elementary(0.0, 0.0, &[(a / tau, tau)])
    }

    /// `alpha + beta t + sum_j m_j min(r_j, t)` with `m_j >= 0`, `0 < r_j < inf`.
    pub fn from_elementary(alpha: f64, beta: f64, atoms: &[(f64, f64)]) -> Self {
        let mut atoms: Vec<(f64, f64)> = atoms.iter().copied().filter(|a| a.0 > 0.0).collect();
        atoms.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut slope: f64 = beta + atoms.iter().map(|a| a.0).sum::<f64>();
        let mut knots = vec![(0.0, alpha)];
        let mut i = 0;
        while i < atoms.len() {
            let r = atoms[i].1;
            let (tp, yp) = *knots.last().unwrap();
            let y = yp + slope * (r - tp);
            while i < atoms.len() && atoms[i].1 == r {
                slope -= atoms[i].0;
                i += 1;
            }
            knots.push((r, y));
        }
        ConcavePL { knots, tail_slope: beta }.canonical()
    }

    /// Least concave nondecreasing majorant of a point set, with the
    /// continuation slope fixed to `tail_slope >= 0`.
    ///
    /// A point at `t = 0` is required; if none is given, `(0, 0)` is used.
    pub fn hull(points: &[(f64, f64)], tail_slope: f64) -> Self {
        let mut pts: Vec<(f64, f64)> =
            points.iter().copied().filter(|p| p.0 >= 0.0 && p.0.is_finite()).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        pts.dedup_by(|b, a| a.0 == b.0);
        if pts.first().map_or(true, |p| p.0 > 0.0) {
            pts.insert(0, (0.0, 0.0));
        }
        let mut h: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for p in pts {
            while h.len() >= 2 {
                let a = h[h.len() - 2];
                let b = h[h.len() - 1];
                // drop b when it lies on or below the chord a -> p
                if (b.1 - a.1) * (p.0 - a.0) <= (p.1 - a.1) * (b.0 - a.0) {
                    h.pop();
                } else {
                    break;
                }
            }
            h.push(p);
        }
        while h.len() >= 2 {
            let a = h[h.len() - 2];
            let b = h[h.len() - 1];
            if (b.1 - a.1) < tail_slope * (b.0 - a.0) {
                h.pop();
            } else {
                break;
            }
        }
        if h[0].1 < 0.0 {
            h[0].1 = 0.0;
        }
        ConcavePL { knots: h, tail_slope }.canonical()
    }

    fn check_shape(&self) -> Result<()> {
        let Some(first) = self.knots.first() else {
            return Err(Error::NotConcave("no knots".into()));
        };
        if first.0 != 0.0 {
            return Err(Error::NotConcave("first knot must be at t = 0".into()));
        }
        if !(self.tail_slope.is_finite() && self.tail_slope >= 0.0) {
            return Err(Error::NotConcave("tail slope must be finite and >= 0".into()));
        }
        for k in &self.knots {
            if !(k.0.is_finite() && k.1.is_finite()) {
                return Err(Error::NotConcave("knots must be finite".into()));
            }
        }
        for w in self.knots.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::NotConcave("knot abscissae must increase".into()));
            }
        }
        Ok(())
    }

    fn slopes(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self
            .knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        s.push(self.tail_slope);
        s
    }

    fn scale_hint(&self) -> f64 {
        self.knots.iter().fold(0.0f64, |m, k| m.max(k.1.abs()))
    }

    /// Smallest relative slack over nonnegativity, monotonicity and concavity.
    /// Nonnegative for a valid curve.
    pub fn slack(&self) -> f64 {
        let ys = self.scale_hint().max(f64::MIN_POSITIVE);
        let mut worst = self.knots[0].1 / ys;
        let s = self.slopes();
        for w in self.knots.windows(2) {
            worst = worst.min((w[1].1 - w[0].1) / ys);
        }
        worst = worst.min(self.tail_slope);
        for w in s.windows(2) {
            let d = w[0] - w[1];
            let m = w[0].abs().max(w[1].abs());
            if m > 0.0 {
                worst = worst.min(d / m);
            }
        }
        worst
    }

    /// Merges knots whose adjacent slopes agree to [`MERGE_TOL`].
    pub fn canonical(mut self) -> Self {
        let mut i = 1;
        while i < self.knots.len() {
            let a = self.knots[i - 1];
            let b = self.knots[i];
            let s_left = (b.1 - a.1) / (b.0 - a.0);
            let s_right = if i + 1 < self.knots.len() {
                let c = self.knots[i + 1];
                (c.1 - b.1) / (c.0 - b.0)
            } else {
                self.tail_slope
            };
            let m = s_left.abs().max(s_right.abs());
            if (s_left - s_right).abs() <= MERGE_TOL * m || m == 0.0 {
                if i + 1 == self.knots.len() {
                    // the continuation replaces the last segment
                    self.tail_slope = s_left.max(0.0);
                }
                self.knots.remove(i);
            } else {
                i += 1;
            }
        }
        self
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn knot_ts(&self) -> impl Iterator<Item = f64> + '_ {
        self.knots.iter().map(|k| k.0)
    }

    pub fn tail_slope(&self) -> f64 {
        self.tail_slope
    }

    /// Limit at `0+`.
    pub fn value_at_zero(&self) -> f64 {
        self.knots[0].1
    }

    /// Slope on the first segment (the tail slope if there is only one knot).
    pub fn initial_slope(&self) -> f64 {
        if self.knots.len() > 1 {
            let (a, b) = (self.knots[0], self.knots[1]);
            (b.1 - a.1) / (b.0 - a.0)
        } else {
            self.tail_slope
        }
    }

    /// `sup phi`, which is finite only when the tail slope is zero.
    pub fn sup_value(&self) -> f64 {
        if self.tail_slope > 0.0 {
            f64::INFINITY
        } else {
            self.knots.last().unwrap().1
        }
    }

    pub fn last_knot(&self) -> (f64, f64) {
        *self.knots.last().unwrap()
    }

    /// Member of the subcone vanishing at `0+` and sublinear at infinity.
    pub fn is_conv0(&self) -> bool {
        self.value_at_zero() == 0.0 && self.tail_slope == 0.0
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        if t <= 0.0 {
            return k[0].1;
        }
        let (tl, yl) = *k.last().unwrap();
        if t >= tl {
            return yl + self.tail_slope * (t - tl);
        }
        let i = k.partition_point(|p| p.0 <= t);
        let (a, b) = (k[i - 1], k[i]);
        let w = (t - a.0) / (b.0 - a.0);
        a.1 + w * (b.1 - a.1)
    }

    pub fn scale(&self, lambda: f64) -> ConcavePL {
        assert!(lambda >= 0.0 && lambda.is_finite());
        if lambda == 0.0 {
            return ConcavePL::zero();
        }
        ConcavePL {
            knots: self.knots.iter().map(|k| (k.0, lambda * k.1)).collect(),
            tail_slope: lambda * self.tail_slope,
        }
    }

    pub fn add(&self, other: &ConcavePL) -> ConcavePL {
        let mut ts: Vec<f64> = self.knot_ts().chain(other.knot_ts()).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let knots = ts.iter().map(|t| (*t, self.eval(*t) + other.eval(*t))).collect();
        ConcavePL { knots, tail_slope: self.tail_slope + other.tail_slope }.canonical()
    }

    pub fn sum<'a>(it: impl IntoIterator<Item = &'a ConcavePL>) -> ConcavePL {
        it.into_iter().fold(ConcavePL::zero(), |acc, c| acc.add(c))
    }

    fn union_ts(&self, other: &ConcavePL) -> Vec<f64> {
        let mut ts: Vec<f64> = self.knot_ts().chain(other.knot_ts()).filter(|t| *t > 0.0).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }

    /// `sup_{t > 0} self(t) / other(t)`, exact for piecewise-linear curves:
    /// the ratio is monotone between consecutive knots, so the supremum is
    /// attained at a knot or in one of the limits `t -> 0+`, `t -> inf`.
    /// Points where both curves vanish are skipped.
    pub fn sup_ratio(&self, other: &ConcavePL) -> RatioSup {
        let mut best = RatioSup { value: 0.0, at: 0.0 };
        let mut consider = |v: f64, at: f64| {
            if v > best.value {
                best = RatioSup { value: v, at };
            }
        };
        let (f0, g0) = (self.value_at_zero(), other.value_at_zero());
        if g0 > 0.0 {
            consider(f0 / g0, 0.0);
        } else if f0 > 0.0 {
            consider(f64::INFINITY, 0.0);
        } else {
            let (fs, gs) = (self.initial_slope(), other.initial_slope());
            if gs > 0.0 {
                consider(fs / gs, 0.0);
            } else if fs > 0.0 {
                consider(f64::INFINITY, 0.0);
            }
        }
        for t in self.union_ts(other) {
            let (f, g) = (self.eval(t), other.eval(t));
            if g > 0.0 {
                consider(f / g, t);
            } else if f > 0.0 {
                consider(f64::INFINITY, t);
            }
        }
        let (fs, gs) = (self.tail_slope, other.tail_slope);
        if gs > 0.0 {
            consider(fs / gs, f64::INFINITY);
        } else if fs > 0.0 {
            consider(f64::INFINITY, f64::INFINITY);
        }
        best
    }

    /// `min_t (other(t) - self(t))` over knots and both asymptotic slopes
    /// (`-inf` if `self` eventually overtakes `other`).
    pub fn min_gap_below(&self, other: &ConcavePL) -> f64 {
        let mut m = other.value_at_zero() - self.value_at_zero();
        for t in self.union_ts(other) {
            m = m.min(other.eval(t) - self.eval(t));
        }
        if self.tail_slope > other.tail_slope {
            return f64::NEG_INFINITY;
        }
        m
    }

    /// Largest difference at knots, tails compared by slope.
    pub fn max_abs_diff(&self, other: &ConcavePL) -> f64 {
        let mut m = (self.value_at_zero() - other.value_at_zero()).abs();
        for t in self.union_ts(other) {
            m = m.max((self.eval(t) - other.eval(t)).abs());
        }
        if (self.tail_slope - other.tail_slope).abs() > 0.0 {
            return f64::INFINITY;
        }
        m
    }
}
