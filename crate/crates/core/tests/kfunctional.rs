mod common;

use common::*;
use kdiv::kfunctional::exact::{k_exact_l1_linf, seq_as_step};
use kdiv::kfunctional::{
    conv_to_element, equivalence_band, k_curve, k_numeric, k_numeric_legs, k_value, method_for, Method, DEFAULT_ACCURACY,
};
use kdiv::lattice::convexify::{power_couple, power_map};
use kdiv::{ConcavePL, Couple, DyadicGrid, Element, Leg, WeightedSeq};
use proptest::prelude::*;

const INF: f64 = f64::INFINITY;

fn seq(v: &[f64]) -> Element {
    Element::seq(v.to_vec()).unwrap()
}

fn curve(x: &Element, c: &Couple) -> ConcavePL {
    k_curve(x, c, &DyadicGrid::default(), DEFAULT_ACCURACY).unwrap().curve
}

#[test]
fn weighted_l1_example_matches_brute_force() {
    let c = Couple::weighted_l1(vec![1.0, 1.0], vec![1.0, 2.0]).unwrap();
    let k = curve(&seq(&[1.0, 1.0]), &c);
    for t in oracle_ts() {
        let expect = t.min(1.0) + (2.0 * t).min(1.0);
        assert!((k.eval(t) - expect).abs() <= 1e-15 * expect.max(1.0));
        assert!((brute_k_weighted(&[1.0, 1.0], &[1.0, 1.0], &[1.0, 2.0], t) - expect).abs() < 1e-12);
    }
    let zero = curve(&seq(&[0.0, 0.0]), &c);
    assert!(oracle_ts().iter().all(|t| zero.eval(*t) == 0.0));
    let single = Couple::weighted_l1(vec![1.0], vec![1.0]).unwrap();
    assert_eq!(k_value(&seq(&[1.0]), &single, 0.5, DEFAULT_ACCURACY).unwrap(), 0.5);
}

#[test]
fn infinite_weights() {
    let c = Couple::weighted_l1(vec![INF, 1.0], vec![1.0, INF]).unwrap();
    let k = curve(&seq(&[2.0, 3.0]), &c);
    assert_eq!(k.eval(0.5), 2.0 * 0.5 + 3.0);
    let both = Couple::weighted_l1(vec![INF], vec![INF]).unwrap();
    assert!(k_curve(&seq(&[1.0]), &both, &DyadicGrid::default(), 1e-9).is_err());
}

#[test]
fn l1_linf_examples() {
    let c = Couple::function(1.0, INF);
    let f = Element::step(vec![0.0, 2.0], vec![1.0]).unwrap();
    let k = curve(&f, &c);
    for t in [0.5, 1.0, 2.0, 3.0, 10.0] {
        assert_eq!(k.eval(t), t.min(2.0));
    }
    let g = Element::step(vec![0.0, 1.0, 2.0], vec![1.0, -3.0]).unwrap();
    let k = curve(&g, &c);
    for (t, v) in [(0.5, 1.5), (1.0, 3.0), (1.5, 3.5), (2.0, 4.0), (7.0, 4.0)] {
        assert!((k.eval(t) - v).abs() < 1e-15, "t = {t}");
    }
    assert_eq!(method_for(&c), Method::ExactL1Linf);
}

#[test]
fn hull_examples() {
    let c = Couple::LinftyCouple;
    let h = Element::step(vec![0.0, 1.0, 2.0], vec![0.0, -1.0]).unwrap();
    let k = curve(&h, &c);
    for t in [0.25, 1.0, 1.75, 4.0] {
        assert_eq!(k.eval(t), t.min(1.0));
    }
    assert_eq!(k, curve(&h.abs(), &c));
    // min(1, t) on a fine grid is its own majorant at the grid corners
    let breaks: Vec<f64> = (0..=64).map(|k| k as f64 / 32.0).collect();
    let vals: Vec<f64> = breaks[..64].iter().map(|a| a.min(1.0)).collect();
    let s = Element::step(breaks, vals).unwrap();
    let k = curve(&s, &c);
    for t in [0.25, 0.5, 1.0, 1.5] {
        assert!((k.eval(t) - t.min(1.0)).abs() < 1e-12);
    }
}

#[test]
fn half_infinity_unit_vector() {
    let c = Couple::sequence(0.5, INF);
    let e = seq(&[1.0, 0.0, 0.0]);
    for t in oracle_ts() {
        let (v, w) = k_numeric(&e, &c, t, DEFAULT_ACCURACY).unwrap();
        assert!((v - t.min(1.0)).abs() <= 1e-9 * v.max(1e-300), "t = {t}: {v}");
        assert_eq!(w.x0.add(&w.x1).unwrap(), e);
    }
    let (v, w) = k_numeric(&e.zero_like(), &c, 1.0, DEFAULT_ACCURACY).unwrap();
    assert_eq!(v, 0.0);
    assert!(w.x0.is_zero() && w.x1.is_zero());
}

#[test]
fn discrete_calderon_formula() {
    let mut rng = kdiv::rng::seeded(31);
    let c = Couple::sequence(1.0, INF);
    for _ in 0..20 {
        let a = rand_vec(&mut rng, 4);
        let exact = k_exact_l1_linf(&seq_as_step(&WeightedSeq::new(a.clone()).unwrap()));
        for t in oracle_ts() {
            let (v, _) = k_numeric(&seq(&a), &c, t, DEFAULT_ACCURACY).unwrap();
            assert!(rel_err(v, exact.eval(t)) <= 1e-6, "{a:?} t = {t}");
        }
    }
}

#[test]
fn dyadic_realizations() {
    let b = conv_to_element(&ConcavePL::min_ramp(1.0, 1.0), None).unwrap();
    assert_eq!((b.alpha, b.beta), (0.0, 0.0));
    let nonzero: Vec<(i32, f64)> =
        b.coeffs.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (b.n_min + i as i32, *v)).collect();
    assert_eq!(nonzero, vec![(0, 1.0)]);
    assert_eq!(b.k_curve(), ConcavePL::min_ramp(1.0, 1.0));

    let lin = conv_to_element(&ConcavePL::linear(1.0), None).unwrap();
    assert_eq!((lin.alpha, lin.beta), (0.0, 1.0));
    assert!(lin.coeffs.iter().all(|v| *v == 0.0));
    let one = conv_to_element(&ConcavePL::constant(1.0), None).unwrap();
    assert_eq!((one.alpha, one.beta), (1.0, 0.0));
    assert!(one.coeffs.iter().all(|v| *v == 0.0));

    // the realized element's K-curve, computed by the engine, matches the formula
    let mut rng = kdiv::rng::seeded(32);
    for _ in 0..20 {
        let phi = rand_conv(&mut rng);
        let b = conv_to_element(&phi, None).unwrap();
        let k = curve(&Element::Seq(b.to_seq()), &b.couple());
        assert!(k.max_abs_diff(&b.k_curve()) <= 1e-12 * phi.sup_value().max(1.0));
        let (lo, hi) = equivalence_band(&phi, &b);
        assert!(lo >= 1.0 - 1e-12 && hi <= 2.0 + 1e-12, "{lo} {hi}");
    }
}

fn arb_seq(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), -2.0f64..2.0], 1..=max)
}

fn arb_t() -> impl Strategy<Value = f64> {
    (-16i32..=16).prop_map(|k| 2f64.powf(k as f64 / 2.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn numeric_matches_exact_engines(a in arb_seq(6), w in prop::collection::vec(0.1f64..10.0, 12)) {
        let n = a.len();
        let x = seq(&a);
        let couples = [
            Couple::sequence(1.0, INF),
            Couple::SequenceLp { p: 1.0, q: 1.0, w0: Some(w[..n].to_vec()), w1: Some(w[6..6 + n].to_vec()) },
        ];
        for c in couples {
            let (l0, l1) = c.legs();
            let exact = curve(&x, &c);
            for t in oracle_ts() {
                let (v, _) = k_numeric_legs(&x, &l0, &l1, t, DEFAULT_ACCURACY).unwrap();
                prop_assert!(rel_err(v, exact.eval(t)) <= 1e-6, "t = {}: {} vs {}", t, v, exact.eval(t));
            }
        }
    }

    #[test]
    fn brute_force_never_beats_numeric(a in arb_seq(3), t in arb_t()) {
        for (p, q) in [(0.5, 1.0), (0.5, INF)] {
            let (v, _) = k_numeric(&seq(&a), &Couple::sequence(p, q), t, DEFAULT_ACCURACY).unwrap();
            let b = brute_k_seq(&a, p, q, t);
            prop_assert!(v <= b * (1.0 + DEFAULT_ACCURACY) + 1e-15, "{} > brute {}", v, b);
        }
    }

    #[test]
    fn witness_is_a_sign_aligned_split(a in arb_seq(5), t in arb_t()) {
        let x = seq(&a);
        let (v, w) = k_numeric(&x, &Couple::sequence(0.5, 2.0), t, DEFAULT_ACCURACY).unwrap();
        prop_assert!(w.x0.add(&w.x1).unwrap().max_abs_diff(&x).unwrap() <= 1e-12);
        for (x0, xv) in w.x0.values().iter().zip(x.values()) {
            prop_assert!(x0 * xv >= 0.0 && x0.abs() <= xv.abs());
        }
        let (l0, l1) = Couple::sequence(0.5, 2.0).legs();
        let cost = l0.norm(&w.x0).unwrap() + t * l1.norm(&w.x1).unwrap();
        prop_assert!((cost - v).abs() <= 1e-12 * v.max(1.0));
    }

    #[test]
    fn homogeneity(a in arb_seq(4), lambda in -4.0f64..4.0, t in arb_t()) {
        let x = seq(&a);
        let y = x.scale(lambda);
        let c = Couple::weighted_l1(vec![1.0; a.len()], (0..a.len()).map(|k| 2f64.powi(k as i32)).collect()).unwrap();
        let (kx, ky) = (k_value(&x, &c, t, 1e-9).unwrap(), k_value(&y, &c, t, 1e-9).unwrap());
        prop_assert!((ky - lambda.abs() * kx).abs() <= 1e-14 * ky.max(1.0));
        let c = Couple::sequence(0.5, INF);
        let (kx, ky) = (k_value(&x, &c, t, 1e-9).unwrap(), k_value(&y, &c, t, 1e-9).unwrap());
        prop_assert!((ky - lambda.abs() * kx).abs() <= 1e-9 * ky.max(1e-300));
    }

    #[test]
    fn swap_symmetry(a in arb_seq(4), t in arb_t()) {
        let x = seq(&a);
        let (l0, l1) = (Leg::lp(0.5), Leg::lp(INF));
        let (k, _) = k_numeric_legs(&x, &l0, &l1, t, DEFAULT_ACCURACY).unwrap();
        let (ks, _) = k_numeric_legs(&x, &l1, &l0, 1.0 / t, DEFAULT_ACCURACY).unwrap();
        prop_assert!(rel_err(k, t * ks) <= 1e-9);
    }

    #[test]
    fn convexification_bridge(a in arb_seq(4), t in arb_t()) {
        let p = 0.5;
        let c = Couple::sequence(p, INF);
        let x = seq(&a);
        let u = power_map(&x.abs(), p);
        let pc = power_couple(&c, p).unwrap();
        let lhs = k_value(&x, &c, t.powf(1.0 / p), DEFAULT_ACCURACY).unwrap().powf(p);
        let rhs = k_value(&u, &pc, t, DEFAULT_ACCURACY).unwrap();
        let f = 2f64.powf(1.0 - p) * (1.0 + 1e-9);
        prop_assert!(lhs <= f * rhs + 1e-15 && rhs <= f * lhs + 1e-15, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn curves_are_concave_and_reach_the_leg_norm(a in arb_seq(5)) {
        let x = seq(&a);
        let c = Couple::sequence(1.0, INF);
        let k = curve(&x, &c);
        prop_assert!(k.slack() >= -1e-9);
        let l1: f64 = a.iter().map(|v| v.abs()).sum();
        prop_assert!((k.sup_value() - l1).abs() <= 1e-12 * l1.max(1.0));
        let linf = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!((k.initial_slope() - linf).abs() <= 1e-12);
    }
}
