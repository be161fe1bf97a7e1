//! The p-version: split `x` given `K(., x) <= (sum phi_i^p)^(1/p)`.
//!
//! Works on `u = |x|^p` in the power couple, where the majorants become
//! `psi_i(t) = phi_i(t^(1/p))^p`. Those are only quasi-concave, so each is
//! replaced by the concave hull of its samples before the linear pipeline runs.

use super::fundamental::DEFAULT_EPSILON;
use super::kdivide::{k_divide_eps, k_divide_gamma, DivisibilityCertificate, HYPOTHESIS_TOL};
use crate::error::{Error, Result};
use crate::grid::DyadicGrid;
use crate::kfunctional::{k_curve, DEFAULT_ACCURACY};
use crate::lattice::convexify::{power_couple, power_map};
use crate::lattice::{ConcavePL, Couple, Element};

/// Certified bound on every `c_i` for exponent `p`.
///
/// Each power step between `x` and `u` loses `2^(1-p)` in the K-functional
/// and the concave hull of `psi_i` is within a factor 2 of it.
pub fn p_k_divide_gamma(p: f64, epsilon: f64) -> f64 {
    if p == 1.0 {
        k_divide_gamma(epsilon)
    } else {
        (2f64.powf(3.0 - 2.0 * p) * k_divide_gamma(epsilon)).powf(1.0 / p)
    }
}

pub fn p_k_divide(x: &Element, couple: &Couple, p: f64, majorants: &[ConcavePL]) -> Result<DivisibilityCertificate> {
    p_k_divide_eps(x, couple, p, majorants, DEFAULT_EPSILON)
}

pub fn p_k_divide_eps(
    x: &Element,
    couple: &Couple,
    p: f64,
    majorants: &[ConcavePL],
    epsilon: f64,
) -> Result<DivisibilityCertificate> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!("p must lie in (0, 1], got {p}")));
    }
    if p == 1.0 {
        return k_divide_eps(x, couple, majorants, epsilon);
    }
    if majorants.is_empty() {
        return Err(Error::invalid("need at least one majorant"));
    }
    couple.validate()?;
    couple.check_element(x)?;
    let inner = power_couple(couple, p)?;
    let grid = DyadicGrid::default();
    let kx = k_curve(x, couple, &grid, DEFAULT_ACCURACY)?.curve;

    let mut ss = grid.points();
    ss.extend(kx.knot_ts().filter(|t| *t > 0.0));
    for phi in majorants {
        ss.extend(phi.knot_ts().filter(|t| *t > 0.0));
    }
    ss.sort_by(f64::total_cmp);
    ss.dedup();
    let p_sum = |s: f64| majorants.iter().map(|f| f.eval(s).powf(p)).sum::<f64>().powf(1.0 / p);
    for &s in &ss {
        let (lhs, rhs) = (kx.eval(s), p_sum(s));
        if lhs > rhs * (1.0 + HYPOTHESIS_TOL) {
            return Err(Error::HypothesisViolated { t: s, lhs, rhs });
        }
    }

    let u = power_map(x, p);
    let ku = k_curve(&u, &inner, &grid, DEFAULT_ACCURACY)?.curve;
    let mut ts: Vec<f64> = ss.iter().map(|s| s.powf(p)).collect();
    ts.extend(ku.knot_ts().filter(|t| *t > 0.0));
    ts.sort_by(f64::total_cmp);
    ts.dedup();

    let lift = 2f64.powf(1.0 - p);
    let mut quasi: f64 = 1.0;
    let mut inner_maj = Vec::with_capacity(majorants.len());
    for phi in majorants {
        let psi = |t: f64| phi.eval(t.powf(1.0 / p)).powf(p);
        let mut pts = vec![(0.0, phi.value_at_zero().powf(p))];
        pts.extend(ts.iter().map(|t| (*t, psi(*t))));
        let hull = ConcavePL::hull(&pts, phi.tail_slope().powf(p));
        for (t, v) in &pts[1..] {
            let h = hull.eval(*t);
            if h > 0.0 {
                quasi = quasi.min(v / h);
            }
        }
        inner_maj.push(hull.scale(lift));
    }

    let cert = match k_divide_eps(&u, &inner, &inner_maj, epsilon) {
        Err(Error::HypothesisViolated { t, lhs, rhs }) => {
            return Err(Error::HypothesisViolated { t: t.powf(1.0 / p), lhs: lhs.powf(1.0 / p), rhs: rhs.powf(1.0 / p) })
        }
        r => r?,
    };

    let pieces: Vec<Element> = cert.pieces.iter().map(|ui| power_map(ui, 1.0 / p)).collect();
    let mut constants = Vec::with_capacity(pieces.len());
    for (xi, phi) in pieces.iter().zip(majorants) {
        constants.push(if xi.is_zero() {
            0.0
        } else {
            k_curve(xi, couple, &grid, DEFAULT_ACCURACY)?.curve.sup_ratio(phi).value
        });
    }
    // |x| = (sum |x_i|^p)^(1/p); partial sums increase, so the full sum is the sup
    let mut acc = x.zero_like();
    for xi in &pieces {
        acc = acc.zip_with(xi, |a, b| a + b.abs().powf(p))?;
    }
    let residual = acc.map(|v| v.powf(1.0 / p)).max_abs_diff(&x.abs())?;
    let positive = pieces.iter().all(|xi| {
        xi.values().iter().zip(x.values()).all(|(a, b)| a * b >= 0.0 && a.abs() <= b.abs() * (1.0 + 1e-12))
    });
    let gamma_cert = p_k_divide_gamma(p, epsilon);
    let gamma_measured = constants.iter().copied().fold(0.0, f64::max);
    let valid = cert.valid && positive && residual <= 1e-10 * x.max_abs().max(1.0) && gamma_measured <= gamma_cert;
    Ok(DivisibilityCertificate {
        pieces,
        majorants: majorants.to_vec(),
        constants,
        residual,
        gamma_cert,
        gamma_measured,
        fundamental_gamma: cert.fundamental_gamma,
        band: cert.band,
        domination: cert.domination,
        transfer_constant: cert.transfer_constant,
        p,
        quasi_concavity: Some(quasi),
        valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn p_one_is_k_divide() {
        let x = Element::seq(vec![1.0, -0.5]).unwrap();
        let c = Couple::weighted_l1(vec![1.0, 1.0], vec![1.0, 0.25]).unwrap();
        let phi = k_curve(&x, &c, &DyadicGrid::default(), 1e-9).unwrap().curve;
        let maj = vec![phi.scale(0.5), phi.scale(0.5)];
        assert_eq!(p_k_divide(&x, &c, 1.0, &maj).unwrap(), k_divide_eps(&x, &c, &maj, DEFAULT_EPSILON).unwrap());
    }

    #[test]
    fn single_majorant_returns_x() {
        let x = Element::seq(vec![0.5, -2.0, 1.0]).unwrap();
        let c = Couple::sequence(0.5, INF);
        let phi = k_curve(&x, &c, &DyadicGrid::default(), 1e-9).unwrap().curve;
        let cert = p_k_divide(&x, &c, 0.5, &[phi]).unwrap();
        assert!(cert.valid, "{cert:?}");
        assert!(cert.pieces[0].max_abs_diff(&x).unwrap() < 1e-12);
        assert!(cert.quasi_concavity.unwrap() >= 0.5);
    }

    #[test]
    fn rejects_bad_p() {
        let x = Element::seq(vec![1.0]).unwrap();
        let c = Couple::sequence(0.5, INF);
        assert!(p_k_divide(&x, &c, 1.5, &[ConcavePL::linear(1.0)]).unwrap_err().is_validation());
        assert!(p_k_divide(&x, &c, 0.0, &[ConcavePL::linear(1.0)]).unwrap_err().is_validation());
    }

    #[test]
    fn hypothesis_reported_in_original_scale() {
        let x = Element::seq(vec![1.0]).unwrap();
        let c = Couple::sequence(0.5, INF);
        let err = p_k_divide(&x, &c, 0.5, &[ConcavePL::constant(0.5)]).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated { .. }));
    }
}
