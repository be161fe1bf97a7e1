//! One-sided searches for lattice convexity constants on finite-dimensional
//! sequence spaces. Each family tried is an explicit witness, so reported
//! values are true bounds; they are not claimed to be sharp.

use rand::Rng as _;
use serde::Serialize;

use super::{Element, Leg};
use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSense {
    /// The true constant is at least `bound`.
    Lower,
    /// The true constant is at most `bound`.
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityEstimate {
    pub bound: f64,
    pub sense: BoundSense,
    /// The family attaining `bound`.
    pub witness: Vec<Element>,
    pub budget: usize,
    pub families_tried: usize,
}

fn seq_norm(leg: &Leg, v: &[f64]) -> Result<f64> {
    leg.norm(&Element::seq(v.to_vec())?)
}

fn lp_combine(vals: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        vals.fold(0.0, f64::max)
    } else {
        let s: f64 = vals.map(|v| v.powf(p)).sum();
        if s == 0.0 {
            0.0
        } else {
            s.powf(1.0 / p)
        }
    }
}

/// `|| (sum |x_k|^p)^(1/p) ||_X / (sum ||x_k||_X^q)^(1/q)`.
pub fn pq_ratio(leg: &Leg, family: &[Vec<f64>], p: f64, q: f64) -> Result<f64> {
    let n = family.first().map_or(0, Vec::len);
    let sum: Vec<f64> = (0..n)
        .map(|j| lp_combine(family.iter().map(|x| x[j].abs()), p))
        .collect();
    let num = seq_norm(leg, &sum)?;
    let norms: Vec<f64> = family.iter().map(|x| seq_norm(leg, x)).collect::<Result<_>>()?;
    let den = lp_combine(norms.into_iter(), q);
    Ok(if den == 0.0 { 0.0 } else { num / den })
}

fn random_vec(n: usize, rng: &mut Rng) -> Vec<f64> {
    let density: f64 = rng.gen_range(0.2..=1.0);
    let mut v: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(density) { rng.gen_range(-1.0..1.0) } else { 0.0 })
        .collect();
    if v.iter().all(|x| *x == 0.0) {
        v[rng.gen_range(0..n)] = 1.0;
    }
    v
}

fn unit(n: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = 1.0;
    v
}

/// Lower bound on the `(p, q)`-convexity constant of a sequence leg in dimension `n`.
///
/// Structured families (single vector, disjoint spikes of every size, equal
/// copies, spike plus flat) are tried first, then random families, until
/// `budget` families have been evaluated.
pub fn pq_convexity_probe(
    leg: &Leg,
    n: usize,
    p: f64,
    q: f64,
    budget: usize,
    rng: &mut Rng,
) -> Result<ConvexityEstimate> {
    if budget == 0 {
        return Err(Error::invalid("probe budget must be positive"));
    }
    if n == 0 {
        return Err(Error::invalid("probe dimension must be positive"));
    }
    if !(q > 0.0 && q <= p) {
        return Err(Error::invalid(format!("need 0 < q <= p, got p = {p}, q = {q}")));
    }
    let mut structured: Vec<Vec<Vec<f64>>> = vec![vec![random_vec(n, rng)]];
    for m in 2..=n {
        structured.push((0..m).map(|k| unit(n, k)).collect());
    }
    let v = random_vec(n, rng);
    for m in [2usize, 4, 8] {
        structured.push(vec![v.clone(); m]);
    }
    structured.push(vec![unit(n, 0), vec![1.0 / n as f64; n]]);

    let mut best = (0.0, Vec::new());
    let mut tried = 0;
    let mut next = structured.into_iter();
    while tried < budget {
        let fam = match next.next() {
            Some(f) => f,
            None => {
                let m = rng.gen_range(1..=n + 2);
                (0..m).map(|_| random_vec(n, rng)).collect()
            }
        };
        let r = pq_ratio(leg, &fam, p, q)?;
        tried += 1;
        if r > best.0 {
            best = (r, fam);
        }
    }
    Ok(ConvexityEstimate {
        bound: best.0,
        sense: BoundSense::Lower,
        witness: best.1.into_iter().map(|v| Element::seq(v)).collect::<Result<_>>()?,
        budget,
        families_tried: tried,
    })
}

/// `max(eps_f, max_i ||x_i||)` for a family `{x, x_i}` with `||x|| = 1`,
/// where `eps_f` is the smallest `eps` for which the average of the `x_i`
/// dominates `(1 - eps) x`. No admissible L-convexity constant exceeds it.
pub fn l_family_value(leg: &Leg, x: &[f64], parts: &[Vec<f64>]) -> Result<f64> {
    let m = parts.len() as f64;
    let mut ratio_min: f64 = 1.0;
    for (j, xj) in x.iter().enumerate() {
        if *xj > 0.0 {
            let avg: f64 = parts.iter().map(|p| p[j]).sum::<f64>() / m;
            ratio_min = ratio_min.min(avg / xj);
        }
    }
    let eps_f = (1.0 - ratio_min).clamp(0.0, 1.0);
    let mut mx: f64 = 0.0;
    for p in parts {
        mx = mx.max(seq_norm(leg, p)?);
    }
    Ok(eps_f.max(mx))
}

/// The uniform vector split into `n` coordinate slices; value in closed form
/// is `max(1 - 1/n, ||e_1|| / ||1||)`.
pub fn slice_family(leg: &Leg, n: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let ones = vec![1.0; n];
    let s = seq_norm(leg, &ones)?;
    let x: Vec<f64> = ones.iter().map(|v| v / s).collect();
    let parts = (0..n)
        .map(|k| {
            let mut v = vec![0.0; n];
            v[k] = x[k];
            v
        })
        .collect();
    Ok((x, parts))
}

/// Upper bound on the admissible L-convexity epsilon of a sequence leg.
pub fn l_convexity_probe(leg: &Leg, n: usize, budget: usize, rng: &mut Rng) -> Result<ConvexityEstimate> {
    if budget == 0 {
        return Err(Error::invalid("probe budget must be positive"));
    }
    if n == 0 {
        return Err(Error::invalid("probe dimension must be positive"));
    }
    let normalize = |v: Vec<f64>| -> Result<Vec<f64>> {
        let s = seq_norm(leg, &v)?;
        Ok(v.into_iter().map(|x| x / s).collect())
    };
    let mut fams: Vec<(Vec<f64>, Vec<Vec<f64>>)> = Vec::new();
    let x0 = normalize(vec![1.0; n])?;
    fams.push((x0.clone(), vec![x0]));
    fams.push(slice_family(leg, n)?);
    let mut best: Option<(f64, Vec<f64>, Vec<Vec<f64>>)> = None;
    let mut tried = 0;
    let mut it = fams.into_iter();
    while tried < budget {
        let (x, parts) = match it.next() {
            Some(f) => f,
            None => {
                let x = normalize(random_vec(n, rng).into_iter().map(f64::abs).collect())?;
                let m = rng.gen_range(1..=n.max(2));
                let parts = (0..m)
                    .map(|_| {
                        let keep: f64 = rng.gen_range(0.1..=1.0);
                        x.iter()
                            .map(|v| if rng.gen_bool(keep) { v * rng.gen_range(0.5..=1.0) } else { 0.0 })
                            .collect()
                    })
                    .collect();
                (x, parts)
            }
        };
        let val = l_family_value(leg, &x, &parts)?;
        tried += 1;
        if best.as_ref().map_or(true, |b| val < b.0) {
            best = Some((val, x, parts));
        }
    }
    let (bound, x, parts) = best.expect("budget > 0");
    let mut witness = vec![Element::seq(x)?];
    for p in parts {
        witness.push(Element::seq(p)?);
    }
    Ok(ConvexityEstimate { bound, sense: BoundSense::Upper, witness, budget, families_tried: tried })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn lp_is_p_convex_with_constant_one() {
        let mut rng = seeded(1);
        for p in [0.5, 1.0, 2.0] {
            let e = pq_convexity_probe(&Leg::lp(p), 5, p, p, 200, &mut rng).unwrap();
            assert!(e.bound <= 1.0 + 1e-12 && e.bound >= 1.0 - 1e-12, "p={p}: {}", e.bound);
        }
    }

    #[test]
    fn single_vector_family_is_one() {
        let mut rng = seeded(2);
        let e = pq_convexity_probe(&Leg::lp(0.5), 4, 1.0, 1.0, 1, &mut rng).unwrap();
        assert!((e.bound - 1.0).abs() < 1e-12);
        assert_eq!(e.witness.len(), 1);
    }

    #[test]
    fn l_half_is_not_one_convex() {
        let mut rng = seeded(3);
        let small = pq_convexity_probe(&Leg::lp(0.5), 2, 1.0, 1.0, 50, &mut rng).unwrap();
        let large = pq_convexity_probe(&Leg::lp(0.5), 8, 1.0, 1.0, 50, &mut rng).unwrap();
        assert!(small.bound >= 2.0 - 1e-12);
        assert!(large.bound >= 8.0 - 1e-9);
        assert!(pq_convexity_probe(&Leg::lp(1.0), 2, 1.0, 2.0, 5, &mut rng).is_err());
        assert!(pq_convexity_probe(&Leg::lp(1.0), 2, 1.0, 1.0, 0, &mut rng).is_err());
    }

    #[test]
    fn l_convexity_values() {
        let mut rng = seeded(4);
        let leg = Leg::lp(1.0);
        let (x, _) = slice_family(&leg, 1).unwrap();
        assert_eq!(l_family_value(&leg, &x, &[x.clone()]).unwrap(), 1.0);
        let e = l_convexity_probe(&leg, 6, 300, &mut rng).unwrap();
        assert!(e.bound >= 0.5 - 1e-12);
        assert_eq!(e.sense, BoundSense::Upper);
        for (p, n) in [(1.0, 4usize), (0.5, 4), (2.0, 9)] {
            let leg = Leg::lp(p);
            let (x, parts) = slice_family(&leg, n).unwrap();
            let closed = (1.0 - 1.0 / n as f64).max((n as f64).powf(-1.0 / p));
            assert!((l_family_value(&leg, &x, &parts).unwrap() - closed).abs() < 1e-12);
            let est = l_convexity_probe(&leg, n, 50, &mut rng).unwrap();
            assert!(est.bound <= closed + 1e-12);
        }
    }
}
