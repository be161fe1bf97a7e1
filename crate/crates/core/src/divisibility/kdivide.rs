use serde::Serialize;

use super::atoms::{atom_curve, atoms};
use super::fundamental::{block_norms, group, FUNDAMENTAL_BOUND, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::grid::DyadicGrid;
use crate::io::float_or_inf;
use crate::kfunctional::{conv_to_element, dyadic_range, dyadic_weights, equivalence_band, k_curve, DEFAULT_ACCURACY};
use crate::lattice::{ConcavePL, Couple, Element};
use crate::lp::{Cmp, LinearProgram, LpStatus};

/// Relative slack allowed when checking `K(., x) <= sum phi_n`.
pub const HYPOTHESIS_TOL: f64 = 1e-9;

/// Bound on the transfer operator norm relative to the domination constant
/// of the two dyadic couples.
pub const TRANSFER_BOUND: f64 = 1.0;

/// `K(., b) <= phi <= BAND * K(., b)` for the dyadic realization `b` of `phi`.
pub const BAND: f64 = 2.0;

const LP_PIVOTS: usize = 200_000;

/// The constant every measured `c_n` must stay under.
pub fn k_divide_gamma(epsilon: f64) -> f64 {
    BAND * FUNDAMENTAL_BOUND * (1.0 + epsilon) * TRANSFER_BOUND
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivisibilityCertificate {
    pub pieces: Vec<Element>,
    pub majorants: Vec<ConcavePL>,
    /// `c_n = sup_t K(t, x_n) / phi_n(t)`.
    #[serde(with = "crate::io::vec_float_or_inf")]
    pub constants: Vec<f64>,
    /// Largest pointwise reconstruction error.
    pub residual: f64,
    pub gamma_cert: f64,
    pub gamma_measured: f64,
    pub fundamental_gamma: f64,
    /// Worst `(min, max)` of `phi_n / K(., b_n)`.
    pub band: (f64, f64),
    /// `sup_t K(t, e; A) / K(t, b; B)` for the two dyadic couples.
    #[serde(with = "float_or_inf")]
    pub domination: f64,
    /// Operator norm of the transfer `S` with `S b = e`.
    #[serde(with = "float_or_inf")]
    pub transfer_constant: f64,
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quasi_concavity: Option<f64>,
    pub valid: bool,
}

/// `sup_t K(t, x) / sum phi`, failing with the worst point when above `1 + tol`.
pub(crate) fn check_hypothesis(kx: &ConcavePL, sum: &ConcavePL) -> Result<()> {
    let r = kx.sup_ratio(sum);
    if r.value > 1.0 + HYPOTHESIS_TOL {
        let (lhs, rhs) = if r.at == 0.0 {
            (kx.value_at_zero().max(kx.initial_slope()), sum.value_at_zero().max(sum.initial_slope()))
        } else if r.at.is_infinite() {
            (kx.tail_slope(), sum.tail_slope())
        } else {
            (kx.eval(r.at), sum.eval(r.at))
        };
        return Err(Error::HypothesisViolated { t: r.at, lhs, rhs });
    }
    Ok(())
}

struct Transfer {
    /// `f[m][c]`: share of column `c` sent to block `m`; rows sum to one.
    f: Vec<Vec<f64>>,
    norm: f64,
}

/// Finds `S >= 0` with `S b = e` between the dyadic couple carrying `b` and the
/// block couple `(A_m, B_m)`, minimizing the operator norm; among optimal
/// plans, mass goes to blocks with the nearest ratio.
fn transfer(blocks: &[(f64, f64, f64)], b: &[f64], n_min: i32) -> Result<Transfer> {
    let cols = b.len();
    let (w0, w1) = dyadic_weights(n_min, n_min + cols as i32 - 3);
    let mut vars: Vec<(usize, usize)> = Vec::new();
    for (m, (_, a, bb)) in blocks.iter().enumerate() {
        let before = vars.len();
        for c in 0..cols {
            if b[c] > 0.0 && (a.is_finite() || w0[c].is_infinite()) && (bb.is_finite() || w1[c].is_infinite()) {
                vars.push((m, c));
            }
        }
        if vars.len() == before {
            return Err(Error::Numeric(format!("no dyadic mass can reach block {m}")));
        }
    }
    let nv = vars.len();
    let pos = |n: f64| -> f64 {
        if n == f64::NEG_INFINITY {
            0.0
        } else if n == f64::INFINITY {
            (cols - 1) as f64
        } else {
            (1.0 + n - n_min as f64).clamp(1.0, (cols - 2) as f64)
        }
    };
    let build = |fixed: Option<f64>| {
        let extra = usize::from(fixed.is_none());
        let mut lp = LinearProgram::<f64>::new(nv + extra);
        for m in 0..blocks.len() {
            let row = (0..nv + extra).map(|v| if v < nv && vars[v].0 == m { 1.0 } else { 0.0 }).collect();
            lp.add_row(row, Cmp::Eq, 1.0);
        }
        for c in 0..cols {
            for (leg, w) in [(0, w0[c]), (1, w1[c])] {
                if w.is_infinite() || b[c] == 0.0 {
                    continue;
                }
                let mut row = vec![0.0; nv + extra];
                let mut any = false;
                for (v, (m, cc)) in vars.iter().enumerate() {
                    if *cc == c {
                        let coef = if leg == 0 { blocks[*m].1 } else { blocks[*m].2 };
                        row[v] = coef / (b[c] * w);
                        any = true;
                    }
                }
                if !any {
                    continue;
                }
                match fixed {
                    None => {
                        row[nv] = -1.0;
                        lp.add_row(row, Cmp::Le, 0.0);
                    }
                    Some(mx) => lp.add_row(row, Cmp::Le, mx),
                }
            }
        }
        lp
    };

    let mut lp = build(None);
    lp.objective[nv] = 1.0;
    let s1 = lp.solve(LP_PIVOTS);
    match s1.status {
        LpStatus::Optimal => {}
        LpStatus::IterationLimit => return Err(Error::IterationLimit(LP_PIVOTS)),
        s => return Err(Error::Numeric(format!("transfer program {s:?}"))),
    }
    let plan = |x: &[f64]| -> Transfer {
        let mut f = vec![vec![0.0; cols]; blocks.len()];
        for (v, (m, c)) in vars.iter().enumerate() {
            f[*m][*c] = x[v].max(0.0);
        }
        for row in f.iter_mut() {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
        }
        let mut norm: f64 = 0.0;
        for c in (0..cols).filter(|c| b[*c] > 0.0) {
            let leg = |w: &[f64], coef: &dyn Fn(usize) -> f64| {
                if w[c].is_infinite() {
                    return 0.0;
                }
                let l: f64 = (0..blocks.len()).filter(|m| f[*m][c] > 0.0).map(|m| f[m][c] * coef(m)).sum();
                l / (b[c] * w[c])
            };
            norm = norm.max(leg(&w0, &|m| blocks[m].1)).max(leg(&w1, &|m| blocks[m].2));
        }
        Transfer { f, norm }
    };
    let first = plan(&s1.x[..nv]);
    let mut lp2 = build(Some(s1.value * (1.0 + 1e-9) + 1e-15));
    lp2.objective = vars.iter().map(|(m, c)| (*c as f64 - pos(blocks[*m].0)).abs()).collect();
    let s2 = lp2.solve(LP_PIVOTS);
    if s2.status == LpStatus::Optimal {
        let second = plan(&s2.x);
        if second.norm <= first.norm * (1.0 + 1e-6) {
            return Ok(second);
        }
    }
    Ok(first)
}

/// Splits `x` into `x_1 + .. + x_N` with `K(., x_n) <= gamma phi_n`, given
/// `K(., x) <= phi_1 + .. + phi_N`.
pub fn k_divide(x: &Element, couple: &Couple, majorants: &[ConcavePL]) -> Result<DivisibilityCertificate> {
    k_divide_eps(x, couple, majorants, DEFAULT_EPSILON)
}

pub fn k_divide_eps(x: &Element, couple: &Couple, majorants: &[ConcavePL], epsilon: f64) -> Result<DivisibilityCertificate> {
    if majorants.is_empty() {
        return Err(Error::invalid("need at least one majorant"));
    }
    let at = atoms(x, couple)?;
    let kx = atom_curve(at.atoms.iter().map(|a| (a.a, a.b)));
    let sum = ConcavePL::sum(majorants);
    check_hypothesis(&kx, &sum)?;
    let gamma_cert = k_divide_gamma(epsilon);
    let nn = majorants.len();

    let groups = group(&at);
    let blocks: Vec<(f64, f64, f64)> = groups
        .iter()
        .map(|(n, mem)| {
            let (a, b) = block_norms(&at, mem);
            (*n, a, b)
        })
        .collect();
    let ka = atom_curve(blocks.iter().map(|b| (b.1, b.2)));
    let fundamental_gamma = if x.is_zero() { 0.0 } else { ka.sup_ratio(&kx).value };

    let (mut lo, mut hi) = (i32::MAX, i32::MIN);
    for phi in majorants {
        let (a, b) = dyadic_range(phi);
        lo = lo.min(a);
        hi = hi.max(b);
    }
    let mut band = (f64::INFINITY, 0.0f64);
    let mut bs = Vec::with_capacity(nn);
    for phi in majorants {
        let b = conv_to_element(phi, Some((lo, hi)))?;
        let (l, h) = equivalence_band(phi, &b);
        if !phi.sup_value().eq(&0.0) {
            band = (band.0.min(l), band.1.max(h));
        }
        bs.push(b.entries());
    }
    let cols = bs[0].len();
    let mut btot: Vec<f64> = (0..cols).map(|c| bs.iter().map(|b| b[c]).sum()).collect();
    // drop round-off mass so the transfer program stays well scaled
    let bmax = btot.iter().copied().fold(0.0, f64::max);
    for c in 0..cols {
        if btot[c] <= 1e-9 * bmax {
            btot[c] = 0.0;
            bs.iter_mut().for_each(|b| b[c] = 0.0);
        }
    }
    let kb = {
        let mut e = conv_to_element(&sum, Some((lo, hi)))?;
        e.alpha = btot[0];
        e.beta = btot[cols - 1];
        e.coeffs = btot[1..cols - 1].to_vec();
        e.k_curve()
    };

    let (domination, transfer_constant, lambda) = if blocks.is_empty() {
        (0.0, 0.0, vec![vec![0.0; at.atoms.len()]; nn])
    } else {
        let d = ka.sup_ratio(&kb).value;
        let tr = transfer(&blocks, &btot, lo)?;
        // block shares per piece, normalized so they sum to one exactly
        let mut share = vec![vec![0.0; blocks.len()]; nn];
        for m in 0..blocks.len() {
            for i in 0..nn {
                share[i][m] = (0..cols).filter(|c| btot[*c] > 0.0).map(|c| tr.f[m][c] * bs[i][c] / btot[c]).sum();
            }
            let s: f64 = (0..nn).map(|i| share[i][m]).sum();
            (0..nn).for_each(|i| share[i][m] /= s);
        }
        let mut lambda = vec![vec![0.0; at.atoms.len()]; nn];
        for (m, (_, mem)) in groups.iter().enumerate() {
            for j in mem {
                for i in 0..nn {
                    lambda[i][*j] = share[i][m];
                }
            }
        }
        (d, tr.norm, lambda)
    };

    let total = at.combine(&vec![1.0; at.atoms.len()]);
    let mut abs_pieces: Vec<Vec<f64>> = lambda.iter().map(|l| at.combine(l)).collect();
    // the largest piece at each coordinate absorbs the rounding residue
    for k in 0..total.len() {
        let big = (0..nn).fold(0, |b, i| if abs_pieces[i][k] > abs_pieces[b][k] { i } else { b });
        let others: f64 = (0..nn).filter(|i| *i != big).map(|i| abs_pieces[i][k]).sum();
        abs_pieces[big][k] = (total[k] - others).max(0.0);
    }
    let pieces: Vec<Element> = abs_pieces.into_iter().map(|v| at.signed(v)).collect();
    finish(x, couple, pieces, majorants, gamma_cert, fundamental_gamma, band, domination, transfer_constant)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    x: &Element,
    couple: &Couple,
    pieces: Vec<Element>,
    majorants: &[ConcavePL],
    gamma_cert: f64,
    fundamental_gamma: f64,
    band: (f64, f64),
    domination: f64,
    transfer_constant: f64,
) -> Result<DivisibilityCertificate> {
    let grid = DyadicGrid::default();
    let mut constants = Vec::with_capacity(pieces.len());
    for (p, phi) in pieces.iter().zip(majorants) {
        let k = k_curve(p, couple, &grid, DEFAULT_ACCURACY)?;
        constants.push(if p.is_zero() { 0.0 } else { k.curve.sup_ratio(phi).value });
    }
    let mut sum = x.zero_like();
    for p in &pieces {
        sum = sum.add(p)?;
    }
    let residual = sum.max_abs_diff(x)?;
    let positive = pieces.iter().all(|p| {
        p.values().iter().zip(x.values()).all(|(a, b)| a * b >= 0.0 && a.abs() <= b.abs() * (1.0 + 1e-12))
    });
    let gamma_measured = constants.iter().copied().fold(0.0, f64::max);
    let valid = positive && residual <= 1e-12 * x.max_abs().max(1.0) && gamma_measured <= gamma_cert;
    Ok(DivisibilityCertificate {
        pieces,
        majorants: majorants.to_vec(),
        constants,
        residual,
        gamma_cert,
        gamma_measured,
        fundamental_gamma,
        band,
        domination,
        transfer_constant,
        p: 1.0,
        quasi_concavity: None,
        valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kx(x: &Element, c: &Couple) -> ConcavePL {
        k_curve(x, c, &DyadicGrid::default(), DEFAULT_ACCURACY).unwrap().curve
    }

    #[test]
    fn single_majorant() {
        let c = Couple::weighted_l1(vec![1.0, 2.0, 1.0], vec![1.0, 0.1, 3.0]).unwrap();
        let x = Element::seq(vec![1.0, -2.0, 0.5]).unwrap();
        let cert = k_divide(&x, &c, &[kx(&x, &c)]).unwrap();
        assert_eq!(cert.pieces, vec![x]);
        assert_eq!(cert.gamma_measured, 1.0);
        assert!(cert.valid);
    }

    #[test]
    fn disjoint_basis_vectors() {
        let c = Couple::weighted_l1(vec![1.0, 1.0], vec![1.0, 0.125]).unwrap();
        let e1 = Element::seq(vec![1.0, 0.0]).unwrap();
        let e2 = Element::seq(vec![0.0, 1.0]).unwrap();
        let x = Element::seq(vec![1.0, 1.0]).unwrap();
        let cert = k_divide(&x, &c, &[kx(&e1, &c), kx(&e2, &c)]).unwrap();
        assert!(cert.pieces[0].max_abs_diff(&e1).unwrap() < 1e-12, "{cert:?}");
        assert!(cert.pieces[1].max_abs_diff(&e2).unwrap() < 1e-12);
        assert!((cert.gamma_measured - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hypothesis_violation_reports_t() {
        let c = Couple::sequence(1.0, f64::INFINITY);
        let x = Element::seq(vec![2.0, 1.0]).unwrap();
        let err = k_divide(&x, &c, &[ConcavePL::min_ramp(1.0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated { .. }), "{err}");
    }

    #[test]
    fn layers_split() {
        let c = Couple::sequence(1.0, f64::INFINITY);
        let x = Element::seq(vec![3.0, -1.0, 2.0, 0.0]).unwrap();
        let k = kx(&x, &c);
        let cert = k_divide(&x, &c, &[k.scale(0.5), k.scale(0.25), k.scale(0.25)]).unwrap();
        assert!(cert.valid, "{cert:?}");
    }
}
