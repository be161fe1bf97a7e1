//! One-sided search for the K(p,q)-monotonicity constant of a space `X`:
//! the worst `||x|| / (sum ||x_i||^q)^(1/q)` over families with
//! `K(t, x) <= (sum K(t, x_i)^p)^(1/p)` on the grid.

use rand::Rng as _;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::DyadicGrid;
use crate::kfunctional::{k_curve, DEFAULT_ACCURACY};
use crate::lattice::{ConcavePL, Couple, Element, Leg};
use crate::rng::Rng;

const HYPOTHESIS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeInstance {
    pub x: Element,
    pub pieces: Vec<Element>,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityEstimate {
    pub trials: usize,
    pub worst_ratio: f64,
    /// The family attaining `worst_ratio`.
    pub worst_instance: Option<ProbeInstance>,
    /// `running_max[k]` is the estimate after `k + 1` trials.
    pub running_max: Vec<f64>,
}

/// Family shape for [`kpq_probe`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpec {
    pub couple: Couple,
    pub space: Leg,
    pub p: f64,
    pub q: f64,
    pub dim: usize,
    pub max_pieces: usize,
    pub grid: DyadicGrid,
}

fn check_pq(p: f64, q: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0 && q > 0.0 && q <= 1.0) {
        return Err(Error::invalid(format!("need exponents in (0, 1], got p = {p}, q = {q}")));
    }
    if q > p {
        return Err(Error::invalid(format!("need q <= p, got p = {p}, q = {q}")));
    }
    Ok(())
}

fn sample_ts(grid: &DyadicGrid, curves: &[&ConcavePL]) -> Vec<f64> {
    let mut ts = grid.points();
    for c in curves {
        ts.extend(c.knot_ts().filter(|t| *t > 0.0));
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

fn p_envelope(ks: &[ConcavePL], p: f64, t: f64) -> f64 {
    ks.iter().map(|k| k.eval(t).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// The probe ratio for one family, or `None` when the hypothesis fails.
pub fn kpq_ratio(
    x: &Element,
    pieces: &[Element],
    couple: &Couple,
    space: &Leg,
    p: f64,
    q: f64,
    grid: &DyadicGrid,
) -> Result<Option<f64>> {
    check_pq(p, q)?;
    let kx = k_curve(x, couple, grid, DEFAULT_ACCURACY)?.curve;
    let ks: Vec<ConcavePL> =
        pieces.iter().map(|xi| Ok(k_curve(xi, couple, grid, DEFAULT_ACCURACY)?.curve)).collect::<Result<_>>()?;
    let mut all: Vec<&ConcavePL> = ks.iter().collect();
    all.push(&kx);
    for t in sample_ts(grid, &all) {
        if kx.eval(t) > (1.0 + HYPOTHESIS_TOL) * p_envelope(&ks, p, t) {
            return Ok(None);
        }
    }
    let tail = ks.iter().map(|k| k.tail_slope().powf(p)).sum::<f64>().powf(1.0 / p);
    if kx.tail_slope() > (1.0 + HYPOTHESIS_TOL) * tail {
        return Ok(None);
    }
    let num = space.norm(x)?;
    if num == 0.0 {
        return Ok(Some(0.0));
    }
    let den = pieces.iter().map(|xi| Ok(space.norm(xi)?.powf(q))).sum::<Result<f64>>()?.powf(1.0 / q);
    Ok(Some(num / den))
}

fn random_piece(rng: &mut Rng, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|_| if rng.gen_bool(0.5) { rng.gen_range(0.0..1.0) * 2f64.powf(rng.gen_range(-3.0..3.0)) } else { 0.0 })
        .collect()
}

/// Runs `trials` random families. Each `x` is the sum, the p-sum or the
/// pointwise max of its pieces, randomly perturbed and then shrunk until the
/// hypothesis holds on the grid. The estimate is a running maximum, so more
/// trials from the same seed never lower it.
pub fn kpq_probe(spec: &ProbeSpec, trials: usize, rng: &mut Rng) -> Result<MonotonicityEstimate> {
    check_pq(spec.p, spec.q)?;
    spec.couple.validate()?;
    if spec.dim == 0 || spec.max_pieces == 0 {
        return Err(Error::invalid("probe needs a positive dimension and piece count"));
    }
    if !spec.couple.is_sequence() {
        return Err(Error::Unsupported("the probe draws sequence elements".into()));
    }
    let p = spec.p;
    let mut est = MonotonicityEstimate { trials, worst_ratio: 0.0, worst_instance: None, running_max: Vec::with_capacity(trials) };
    for k in 0..trials {
        let m = rng.gen_range(1..=spec.max_pieces);
        let raw: Vec<Vec<f64>> = (0..m).map(|_| random_piece(rng, spec.dim)).collect();
        let combined: Vec<f64> = (0..spec.dim)
            .map(|j| {
                let col = raw.iter().map(|r| r[j]);
                let v = match k % 3 {
                    0 => col.sum(),
                    1 => col.map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p),
                    _ => col.fold(0.0, f64::max),
                };
                v * rng.gen_range(0.5..1.5)
            })
            .collect();
        let pieces: Vec<Element> = raw.into_iter().map(Element::seq).collect::<Result<_>>()?;
        let mut x = Element::seq(combined)?;
        let kx = k_curve(&x, &spec.couple, &spec.grid, DEFAULT_ACCURACY)?.curve;
        let ks: Vec<ConcavePL> = pieces
            .iter()
            .map(|xi| Ok(k_curve(xi, &spec.couple, &spec.grid, DEFAULT_ACCURACY)?.curve))
            .collect::<Result<_>>()?;
        let mut all: Vec<&ConcavePL> = ks.iter().collect();
        all.push(&kx);
        let mut lambda: f64 = 1.0;
        for t in sample_ts(&spec.grid, &all) {
            let v = kx.eval(t);
            if v > 0.0 {
                lambda = lambda.min(p_envelope(&ks, p, t) / v);
            }
        }
        let tail = ks.iter().map(|k| k.tail_slope().powf(p)).sum::<f64>().powf(1.0 / p);
        if kx.tail_slope() > 0.0 {
            lambda = lambda.min(tail / kx.tail_slope());
        }
        x = x.scale(lambda * (1.0 - 1e-12));
        if let Some(r) = kpq_ratio(&x, &pieces, &spec.couple, &spec.space, p, spec.q, &spec.grid)? {
            if r > est.worst_ratio {
                est.worst_ratio = r;
                est.worst_instance = Some(ProbeInstance { x, pieces, ratio: r });
            }
        }
        est.running_max.push(est.worst_ratio);
    }
    Ok(est)
}
