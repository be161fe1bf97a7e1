//! Real K-method norms `||K(., x)||_E` for weighted `L^q(dt/t)` parameters.

mod ehat;
mod quad;

use serde::{Deserialize, Serialize};

pub use ehat::{e_hat_upper, BaseSpace, CoverTerm, EHatNorm, EHatValue};

use crate::error::{Error, Result};
use crate::grid::DyadicGrid;
use crate::io::{float_or_inf, opt_vec_float_or_inf};
use crate::kfunctional::k_curve;
use crate::lattice::{ConcavePL, Couple, Element};

/// A parameter lattice on `(0, inf)` with the measure `dt/t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ParameterLattice {
    /// `(int (f(t) t^-theta)^q dt/t)^(1/q)` restricted to the grid range, or
    /// with explicit node weights `w_j` in place of `t_j^-theta`.
    LqDyadic {
        #[serde(with = "float_or_inf")]
        q: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<f64>,
        #[serde(default, with = "opt_vec_float_or_inf", skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
        #[serde(default)]
        grid: DyadicGrid,
    },
    /// Norm is the maximum of the member norms.
    Intersection { members: Vec<ParameterLattice> },
}

/// A curve handed to [`parameter_norm`].
#[derive(Debug, Clone, Copy)]
pub enum CurveRef<'a> {
    Pl(&'a ConcavePL),
    /// Values at the nodes of the lattice's own grid.
    Sampled(&'a [f64]),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamNorm {
    #[serde(with = "float_or_inf")]
    pub value: f64,
    /// Estimated quadrature plus truncation error, in norm units.
    pub quadrature_error: f64,
    /// The curve does not decay at an end of the grid range.
    pub divergent: bool,
}

impl ParameterLattice {
    pub fn lions_peetre(theta: f64, q: f64, grid: DyadicGrid) -> Self {
        ParameterLattice::LqDyadic { q, theta: Some(theta), weights: None, grid }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ParameterLattice::LqDyadic { q, theta, weights, grid } => {
                grid.validate()?;
                if !(*q > 0.0) {
                    return Err(Error::NonPositiveExponent(*q));
                }
                match (theta, weights) {
                    (Some(th), None) if th.is_finite() => Ok(()),
                    (None, Some(w)) if w.len() == grid.len() && w.iter().all(|v| *v >= 0.0 && v.is_finite()) => Ok(()),
                    (None, Some(w)) => Err(Error::invalid(format!(
                        "parameter weights: need {} finite nonnegative values, got {}",
                        grid.len(),
                        w.len()
                    ))),
                    _ => Err(Error::invalid("parameter needs exactly one of `theta` or `weights`")),
                }
            }
            ParameterLattice::Intersection { members } => {
                if members.is_empty() {
                    return Err(Error::invalid("intersection of no lattices"));
                }
                members.iter().try_for_each(|m| m.validate())
            }
        }
    }

    /// Smallest grid containing every member grid, at the finest resolution.
    pub fn covering_grid(&self) -> DyadicGrid {
        match self {
            ParameterLattice::LqDyadic { grid, .. } => *grid,
            ParameterLattice::Intersection { members } => {
                let gs: Vec<DyadicGrid> = members.iter().map(|m| m.covering_grid()).collect();
                DyadicGrid {
                    min_exp: gs.iter().map(|g| g.min_exp).min().unwrap_or(0),
                    max_exp: gs.iter().map(|g| g.max_exp).max().unwrap_or(0),
                    per_octave: gs.iter().map(|g| g.per_octave).max().unwrap_or(1),
                }
            }
        }
    }
}

/// `||f||_E`.
pub fn parameter_norm(f: CurveRef, e: &ParameterLattice) -> Result<f64> {
    Ok(parameter_norm_detailed(f, e)?.value)
}

pub fn parameter_norm_detailed(f: CurveRef, e: &ParameterLattice) -> Result<ParamNorm> {
    e.validate()?;
    match e {
        ParameterLattice::Intersection { members } => {
            let mut out = ParamNorm { value: 0.0, quadrature_error: 0.0, divergent: false };
            for m in members {
                let r = parameter_norm_detailed(f, m)?;
                out.value = out.value.max(r.value);
                out.quadrature_error = out.quadrature_error.max(r.quadrature_error);
                out.divergent |= r.divergent;
            }
            Ok(out)
        }
        ParameterLattice::LqDyadic { q, theta, weights, grid } => {
            let node_w: Vec<f64> = match (theta, weights) {
                (_, Some(w)) => w.clone(),
                (Some(th), None) => grid.points().iter().map(|t| t.powf(-th)).collect(),
                (None, None) => unreachable!("validated"),
            };
            match (f, theta, weights) {
                (CurveRef::Pl(c), Some(th), None) => Ok(pl_norm(c, *th, *q, grid)),
                (CurveRef::Pl(c), _, _) => {
                    let v: Vec<f64> = grid.points().iter().map(|t| c.eval(*t)).collect();
                    Ok(node_norm(&v, &node_w, *q, grid))
                }
                (CurveRef::Sampled(v), _, _) => {
                    if v.len() != grid.len() {
                        return Err(Error::DimensionMismatch { expected: grid.len(), got: v.len() });
                    }
                    if v.iter().any(|s| !(*s >= 0.0) || s.is_infinite()) {
                        return Err(Error::invalid("sampled curve must be finite and nonnegative"));
                    }
                    Ok(node_norm(v, &node_w, *q, grid))
                }
            }
        }
    }
}

/// True when the outer value does not fall below the inner one.
fn no_decay(edge: f64, inner: f64) -> bool {
    edge > 0.0 && edge >= inner * (1.0 - 1e-6)
}

fn pl_norm(f: &ConcavePL, theta: f64, q: f64, grid: &DyadicGrid) -> ParamNorm {
    let edges = grid.cell_edges();
    let (lo, hi) = (edges[0], edges[edges.len() - 1]);
    if q.is_infinite() {
        let value = quad::weighted_sup(f, theta, lo, hi);
        let h = |t: f64| f.eval(t) * t.powf(-theta);
        let divergent = no_decay(h(lo / 2.0), h(lo)) && h(lo / 2.0) > h(lo) * (1.0 + 1e-9)
            || h(2.0 * hi) > h(hi) * (1.0 + 1e-9);
        return ParamNorm { value, quadrature_error: 0.0, divergent };
    }
    let (cells, errs) = quad::cell_integrals(f, theta, q, grid);
    finish(&cells, errs.iter().sum(), q, grid.per_octave as usize)
}

fn node_norm(v: &[f64], w: &[f64], q: f64, grid: &DyadicGrid) -> ParamNorm {
    let prod: Vec<f64> = v.iter().zip(w).map(|(a, b)| a * b).collect();
    if q.is_infinite() {
        let value = prod.iter().copied().fold(0.0, f64::max);
        let n = prod.len();
        let divergent = n >= 2 && (prod[0] > prod[1] * (1.0 + 1e-9) || prod[n - 1] > prod[n - 2] * (1.0 + 1e-9));
        return ParamNorm { value, quadrature_error: 0.0, divergent };
    }
    let d = grid.log_step();
    let cells: Vec<f64> = prod.iter().map(|p| p.powf(q) * d).collect();
    // trapezoid versus midpoint as a crude error estimate
    let trap: f64 = cells.windows(2).map(|c| 0.5 * (c[0] + c[1])).sum::<f64>();
    let mid: f64 = cells.iter().sum::<f64>() - 0.5 * (cells[0] + cells[cells.len() - 1]);
    finish(&cells, (trap - mid).abs(), q, grid.per_octave as usize)
}

/// Sum of cell integrals with boundary decay check and geometric tail estimate.
fn finish(cells: &[f64], quad_err: f64, q: f64, per_octave: usize) -> ParamNorm {
    let sum: f64 = cells.iter().sum();
    let n = cells.len();
    let mut divergent = !sum.is_finite();
    let mut tail = 0.0;
    if n > per_octave {
        for (edge, inner) in [(cells[0], cells[per_octave]), (cells[n - 1], cells[n - 1 - per_octave])] {
            if no_decay(edge, inner) {
                divergent = true;
            } else if edge > 0.0 {
                let r = (edge / inner).powf(1.0 / per_octave as f64);
                tail += edge * r / (1.0 - r);
            }
        }
    }
    let value = sum.powf(1.0 / q);
    let quadrature_error = if sum > 0.0 { (sum + quad_err + tail).powf(1.0 / q) - value } else { 0.0 };
    ParamNorm { value, quadrature_error, divergent }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KSpaceNorm {
    /// `inf` when the curve is flagged divergent.
    #[serde(with = "float_or_inf")]
    pub value: f64,
    /// The finite grid value, before divergence is applied.
    pub grid_value: f64,
    pub quadrature_error: f64,
    pub divergent: bool,
}

/// `||K(., x)||_E`, evaluated on `E`'s grid.
pub fn k_space_norm(x: &Element, couple: &Couple, e: &ParameterLattice, accuracy: f64) -> Result<KSpaceNorm> {
    e.validate()?;
    let kc = k_curve(x, couple, &e.covering_grid(), accuracy)?;
    let r = parameter_norm_detailed(CurveRef::Pl(&kc.curve), e)?;
    Ok(KSpaceNorm {
        value: if r.divergent { f64::INFINITY } else { r.value },
        grid_value: r.value,
        quadrature_error: r.quadrature_error,
        divergent: r.divergent,
    })
}

/// `(int_0^inf (K(t, x) t^-theta)^r dt/t)^(1/r)`, or the supremum for
/// `r = inf`, integrated by composite Simpson over the grid range.
pub fn lions_peetre_norm(
    x: &Element,
    couple: &Couple,
    theta: f64,
    r: f64,
    grid: &DyadicGrid,
    accuracy: f64,
) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::invalid(format!("theta must lie in (0, 1), got {theta}")));
    }
    if !(r > 0.0) {
        return Err(Error::NonPositiveExponent(r));
    }
    grid.validate()?;
    let kc = k_curve(x, couple, grid, accuracy)?;
    let edges = grid.cell_edges();
    if r.is_infinite() {
        return Ok(quad::weighted_sup(&kc.curve, theta, edges[0], edges[edges.len() - 1]));
    }
    Ok(quad::simpson(&kc.curve, theta, r, grid, 8).powf(1.0 / r))
}

/// `sup_t K(t, y; Y) / K(t, x; X)`, exact over the knots of both curves.
pub fn orbit_norm(
    y: &Element,
    couple_y: &Couple,
    x: &Element,
    couple_x: &Couple,
    grid: &DyadicGrid,
    accuracy: f64,
) -> Result<f64> {
    if x.is_zero() {
        return Err(Error::invalid("orbit of the zero element"));
    }
    let ky = k_curve(y, couple_y, grid, accuracy)?;
    let kx = k_curve(x, couple_x, grid, accuracy)?;
    Ok(ky.curve.sup_ratio(&kx.curve).value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn min1t() -> ConcavePL {
        ConcavePL::min_ramp(1.0, 1.0)
    }

    fn lp(theta: f64, q: f64) -> ParameterLattice {
        ParameterLattice::lions_peetre(theta, q, DyadicGrid::default())
    }

    #[test]
    fn zero_curve() {
        let z = ConcavePL::zero();
        assert_eq!(parameter_norm(CurveRef::Pl(&z), &lp(0.5, 2.0)).unwrap(), 0.0);
    }

    #[test]
    fn sup_form() {
        let f = min1t();
        assert!((parameter_norm(CurveRef::Pl(&f), &lp(0.5, f64::INFINITY)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn l2_integral_is_two() {
        let f = min1t();
        let r = parameter_norm_detailed(CurveRef::Pl(&f), &lp(0.5, 2.0)).unwrap();
        assert!((r.value * r.value - 2.0).abs() < 1e-3, "{r:?}");
        assert!(!r.divergent);
    }

    #[test]
    fn flat_tail_diverges_without_weight() {
        let f = min1t();
        let e = ParameterLattice::LqDyadic { q: 1.0, theta: Some(0.0), weights: None, grid: DyadicGrid::default() };
        assert!(parameter_norm_detailed(CurveRef::Pl(&f), &e).unwrap().divergent);
    }

    #[test]
    fn sampled_and_weights() {
        let g = DyadicGrid::new(-2, 2, 1).unwrap();
        let e = ParameterLattice::LqDyadic { q: 1.0, theta: None, weights: Some(vec![1.0; 5]), grid: g };
        let v = [0.0, 1.0, 0.0, 1.0, 0.0];
        let r = parameter_norm(CurveRef::Sampled(&v), &e).unwrap();
        assert!((r - 2.0 * std::f64::consts::LN_2).abs() < 1e-15);
        assert!(parameter_norm(CurveRef::Sampled(&v[..3]), &e).is_err());
    }

    #[test]
    fn bad_parameters() {
        let f = min1t();
        let e = ParameterLattice::LqDyadic { q: 0.0, theta: Some(0.5), weights: None, grid: DyadicGrid::default() };
        assert!(parameter_norm(CurveRef::Pl(&f), &e).is_err());
        let e = ParameterLattice::Intersection { members: vec![] };
        assert!(parameter_norm(CurveRef::Pl(&f), &e).is_err());
    }

    #[test]
    fn parse_json() {
        let e: ParameterLattice = serde_json::from_str(
            r#"{"kind":"intersection","members":[{"kind":"lq_dyadic","q":"inf","theta":0.5},
               {"kind":"lq_dyadic","q":2,"theta":0.25,"grid":{"min_exp":-4,"max_exp":4,"per_octave":2}}]}"#,
        )
        .unwrap();
        e.validate().unwrap();
        assert_eq!(e.covering_grid(), DyadicGrid { min_exp: -20, max_exp: 20, per_octave: 4 });
    }
}
