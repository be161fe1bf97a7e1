use serde::Serialize;

use super::atoms::{atom_curve, atoms, Atoms};
use crate::error::Result;
use crate::io::float_or_inf;
use crate::lattice::{Couple, Element};

pub const DEFAULT_EPSILON: f64 = 0.01;

/// Ratios inside one dyadic block differ by less than a factor 2.
pub const FUNDAMENTAL_BOUND: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    /// Block index: `||y||_0 / ||y||_1` lies in `[2^n, 2^(n+1))`; `-inf` and
    /// `inf` hold the parts seen by only one leg.
    #[serde(with = "float_or_inf")]
    pub n: f64,
    pub element: Element,
    #[serde(with = "float_or_inf")]
    pub norm0: f64,
    #[serde(with = "float_or_inf")]
    pub norm1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FundamentalAudit {
    /// `sup_t sum_n min(||y_n||_0, t ||y_n||_1) / K(t, x)`.
    pub gamma_measured: f64,
    #[serde(with = "float_or_inf")]
    pub at: f64,
    pub bound: f64,
    pub epsilon: f64,
    /// `gamma_measured <= bound (1 + epsilon)`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FundamentalSplit {
    pub blocks: Vec<Block>,
    pub audit: FundamentalAudit,
}

/// Atom indices grouped by block, blocks in increasing order.
pub(crate) fn group(at: &Atoms) -> Vec<(f64, Vec<usize>)> {
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut idx: Vec<usize> = (0..at.atoms.len()).collect();
    idx.sort_by(|i, j| at.atoms[*i].block().total_cmp(&at.atoms[*j].block()).then(i.cmp(j)));
    for i in idx {
        let n = at.atoms[i].block();
        match out.last_mut() {
            Some((m, v)) if *m == n => v.push(i),
            _ => out.push((n, vec![i])),
        }
    }
    out
}

pub(crate) fn block_norms(at: &Atoms, members: &[usize]) -> (f64, f64) {
    members.iter().fold((0.0, 0.0), |(a, b), i| (a + at.atoms[*i].a, b + at.atoms[*i].b))
}

/// Splits `x` into dyadic blocks by the ratio of its two leg norms.
pub fn fundamental_split(x: &Element, couple: &Couple, epsilon: f64) -> Result<FundamentalSplit> {
    let at = atoms(x, couple)?;
    let groups = group(&at);
    let mut blocks = Vec::with_capacity(groups.len());
    for (n, members) in &groups {
        let mut lambda = vec![0.0; at.atoms.len()];
        members.iter().for_each(|i| lambda[*i] = 1.0);
        let (norm0, norm1) = block_norms(&at, members);
        blocks.push(Block { n: *n, element: at.signed(at.combine(&lambda)), norm0, norm1 });
    }
    let kx = atom_curve(at.atoms.iter().map(|a| (a.a, a.b)));
    let lhs = atom_curve(blocks.iter().map(|b| (b.norm0, b.norm1)));
    let r = lhs.sup_ratio(&kx);
    Ok(FundamentalSplit {
        blocks,
        audit: FundamentalAudit {
            gamma_measured: r.value,
            at: r.at,
            bound: FUNDAMENTAL_BOUND,
            epsilon,
            holds: r.value <= FUNDAMENTAL_BOUND * (1.0 + epsilon),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_coordinate() {
        let c = Couple::weighted_l1(vec![1.0, 1.0, 1.0], vec![1.0, 0.5, 4.0]).unwrap();
        let s = fundamental_split(&Element::seq(vec![0.0, 2.0, 0.0]).unwrap(), &c, DEFAULT_EPSILON).unwrap();
        assert_eq!(s.blocks.len(), 1);
        assert_eq!(s.blocks[0].n, 1.0);
        assert_eq!(s.audit.gamma_measured, 1.0);
    }

    #[test]
    fn zero_is_empty() {
        let c = Couple::sequence(1.0, f64::INFINITY);
        let s = fundamental_split(&Element::seq(vec![0.0, 0.0]).unwrap(), &c, DEFAULT_EPSILON).unwrap();
        assert!(s.blocks.is_empty());
        assert!(s.audit.holds);
    }

    #[test]
    fn infinite_blocks() {
        let c = Couple::weighted_l1(vec![f64::INFINITY, 1.0, 1.0], vec![1.0, f64::INFINITY, 1.0]).unwrap();
        let s = fundamental_split(&Element::seq(vec![1.0, -1.0, 1.0]).unwrap(), &c, DEFAULT_EPSILON).unwrap();
        let ns: Vec<f64> = s.blocks.iter().map(|b| b.n).collect();
        assert_eq!(ns, vec![f64::NEG_INFINITY, 0.0, f64::INFINITY]);
        assert_eq!(s.blocks[0].element, Element::seq(vec![0.0, -1.0, 0.0]).unwrap());
    }
}
