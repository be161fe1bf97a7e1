//! Integration of `(f(t) w(t))^q` over `dt/t`, one cell per grid node.

use crate::grid::DyadicGrid;
use crate::lattice::ConcavePL;

const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_48),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_48),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

fn gauss(rule: &[(f64, f64)], a: f64, b: f64, g: &impl Fn(f64) -> f64) -> f64 {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    rule.iter().map(|(x, w)| w * g(m + h * x)).sum::<f64>() * h
}

/// Per-cell integrals of `(f(t) t^-theta)^q` in `u = ln t`, split at the knots
/// of `f`, with the 8-point rule; the second vector holds `|GL8 - GL4|`.
pub(crate) fn cell_integrals(f: &ConcavePL, theta: f64, q: f64, grid: &DyadicGrid) -> (Vec<f64>, Vec<f64>) {
    let edges = grid.cell_edges();
    let knots: Vec<f64> = f.knot_ts().filter(|t| *t > 0.0).map(f64::ln).collect();
    let g = |u: f64| {
        let t = u.exp();
        (f.eval(t) * (-theta * u).exp()).powf(q)
    };
    let mut cells = Vec::with_capacity(edges.len() - 1);
    let mut errs = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let (a, b) = (w[0].ln(), w[1].ln());
        let mut cuts = vec![a];
        cuts.extend(knots.iter().copied().filter(|k| *k > a && *k < b));
        cuts.push(b);
        let (mut hi, mut lo) = (0.0, 0.0);
        for s in cuts.windows(2) {
            hi += gauss(&GL8, s[0], s[1], &g);
            lo += gauss(&GL4, s[0], s[1], &g);
        }
        cells.push(hi);
        errs.push((hi - lo).abs());
    }
    (cells, errs)
}

/// Composite Simpson in `ln t` over the grid range, `2 * sub` panels per cell.
pub(crate) fn simpson(f: &ConcavePL, theta: f64, q: f64, grid: &DyadicGrid, sub: usize) -> f64 {
    let edges = grid.cell_edges();
    let (a, b) = (edges[0].ln(), edges[edges.len() - 1].ln());
    let n = 2 * sub * (edges.len() - 1);
    let h = (b - a) / n as f64;
    let g = |u: f64| (f.eval(u.exp()) * (-theta * u).exp()).powf(q);
    let mut s = g(a) + g(b);
    for i in 1..n {
        let c = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += c * g(a + h * i as f64);
    }
    s * h / 3.0
}

/// `sup f(t) t^-theta` over `[lo, hi]`. On each linear piece `a + b t` with
/// `a >= 0` the product has no interior maximum, so knots and ends suffice.
pub(crate) fn weighted_sup(f: &ConcavePL, theta: f64, lo: f64, hi: f64) -> f64 {
    let h = |t: f64| f.eval(t) * t.powf(-theta);
    f.knot_ts()
        .filter(|t| *t > lo && *t < hi)
        .chain([lo, hi])
        .map(h)
        .fold(0.0, f64::max)
}
