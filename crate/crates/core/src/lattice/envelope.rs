use super::{ConcavePL, StepFunction};

/// Least concave majorant of `|h|` on `(0, inf)` (or on `(0, cap]`).
///
/// The upper-left corner `(a_i, |v_i|)` of each piece is what a concave
/// majorant must clear, so the result is the upper hull of those corners
/// together with the origin, flat after the highest one.
pub fn least_concave_majorant(h: &StepFunction, cap: Option<f64>) -> ConcavePL {
    let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for (a, _, v) in h.pieces() {
        if v == 0.0 {
            continue;
        }
        if let Some(c) = cap {
            if a >= c {
                continue;
            }
        }
        pts.push((a, v.abs()));
    }
    ConcavePL::hull(&pts, 0.0)
}

/// Nonincreasing rearrangement `f*` of `|f|`, starting at `0`.
///
/// Ties keep their original order.
pub fn decreasing_rearrangement(f: &StepFunction) -> StepFunction {
    let mut pieces: Vec<(f64, f64)> = f
        .pieces()
        .filter(|p| p.2 != 0.0)
        .map(|(a, b, v)| (b - a, v.abs()))
        .collect();
    if pieces.is_empty() {
        return StepFunction::zero();
    }
    pieces.sort_by(|x, y| y.1.total_cmp(&x.1));
    let mut breaks = vec![0.0];
    let mut values: Vec<f64> = Vec::new();
    let mut t = 0.0;
    for (len, v) in pieces {
        t += len;
        if values.last() == Some(&v) {
            *breaks.last_mut().unwrap() = t;
        } else {
            values.push(v);
            breaks.push(t);
        }
    }
    StepFunction::new(breaks, values).expect("rearrangement is a valid step function")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rearrange_two_pieces() {
        let f = StepFunction::new(vec![0.0, 1.0, 2.0], vec![1.0, 3.0]).unwrap();
        let r = decreasing_rearrangement(&f);
        assert_eq!(r.breaks(), &[0.0, 1.0, 2.0]);
        assert_eq!(r.values(), &[3.0, 1.0]);
        assert_eq!(decreasing_rearrangement(&r), r);
    }

    #[test]
    fn rearrange_signs_and_gaps() {
        let f = StepFunction::new(vec![1.0, 2.0, 5.0, 6.0], vec![-2.0, 0.0, 2.0]).unwrap();
        let r = decreasing_rearrangement(&f);
        assert_eq!(r.breaks(), &[0.0, 2.0]);
        assert_eq!(r.values(), &[2.0]);
    }

    #[test]
    fn majorant_of_indicator() {
        let h = StepFunction::constant_on(1.0, 2.0, 1.0).unwrap();
        let g = least_concave_majorant(&h, None);
        assert_eq!(g.knots(), &[(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(g.tail_slope(), 0.0);
        let h0 = StepFunction::constant_on(0.0, 1.0, -2.0).unwrap();
        let g0 = least_concave_majorant(&h0, None);
        assert_eq!(g0.eval(1e-9), 2.0);
    }

    #[test]
    fn majorant_cap() {
        let h = StepFunction::new(vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 0.0, 5.0]).unwrap();
        assert_eq!(least_concave_majorant(&h, Some(2.5)).eval(10.0), 1.0);
        assert_eq!(least_concave_majorant(&h, None).eval(10.0), 5.0);
    }
}
