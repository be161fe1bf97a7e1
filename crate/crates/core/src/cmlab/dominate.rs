use serde::Serialize;

use crate::error::Result;
use crate::grid::DyadicGrid;
use crate::io::float_or_inf;
use crate::kfunctional::{k_curve, DEFAULT_ACCURACY};
use crate::lattice::{ConcavePL, Couple, Element};

/// Relative slack when comparing two K-curves.
pub const DOMINATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domination {
    pub dominates: bool,
    /// `min_t K(t, x) - K(t, y)` over the grid and all knots.
    pub margin: f64,
    /// Where the margin is attained; `inf` for the tail slopes.
    #[serde(with = "float_or_inf")]
    pub at: f64,
}

/// Is `K(t, y; Y) <= K(t, x; X)` for all `t > 0`?
///
/// Checked at the grid, at every knot of both curves, at `0+` and on the
/// tail slopes.
pub fn k_dominates(y: &Element, cy: &Couple, x: &Element, cx: &Couple, grid: &DyadicGrid) -> Result<Domination> {
    let ky = k_curve(y, cy, grid, DEFAULT_ACCURACY)?.curve;
    let kx = k_curve(x, cx, grid, DEFAULT_ACCURACY)?.curve;
    Ok(compare(&ky, &kx, grid))
}

pub(crate) fn compare(ky: &ConcavePL, kx: &ConcavePL, grid: &DyadicGrid) -> Domination {
    let below = |a: f64, b: f64| a <= b + DOMINATION_TOL * b.abs().max(f64::MIN_POSITIVE);
    let mut d = Domination { dominates: true, margin: kx.value_at_zero() - ky.value_at_zero(), at: 0.0 };
    d.dominates = below(ky.value_at_zero(), kx.value_at_zero());
    if ky.value_at_zero() == 0.0 && kx.value_at_zero() == 0.0 {
        d.dominates &= below(ky.initial_slope(), kx.initial_slope());
    }
    let mut ts = grid.points();
    ts.extend(ky.knot_ts().chain(kx.knot_ts()).filter(|t| *t > 0.0));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    for t in ts {
        let (a, b) = (ky.eval(t), kx.eval(t));
        if b - a < d.margin {
            d.margin = b - a;
            d.at = t;
        }
        d.dominates &= below(a, b);
    }
    if !below(ky.tail_slope(), kx.tail_slope()) {
        d.dominates = false;
        d.margin = f64::NEG_INFINITY;
        d.at = f64::INFINITY;
    }
    d
}
