//! Oracle-backed checks of the completion layer.
//!
//! Reference values come from independent routes: exact squaring to bracket
//! `sqrt(2)`, Newton's iteration as a second sequence for `sqrt(2)`, and
//! hand-computed 2-adic valuations.

use std::sync::Arc;

use completion_core::completion::{dist_approx, embed, CommuteReport};
use completion_core::spaces::{
    build_generator, sample_points, GeneratorDescriptor, Space,
};
use completion_core::{
    approximate_by_base, check_commutes, check_regularity, completion_iso_roundtrip,
    extend_isometry, ApproxMetric, CPoint, CompleteSpace, Completion, EmbeddedCompletion, Element,
    Extension, MetricSpace, Rational, SpaceRef,
};
use proptest::prelude::*;

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn el(s: &str) -> Element {
    Element::Rational(q(s))
}

fn rat(e: &Element) -> Rational {
    e.as_rational().unwrap().clone()
}

fn qabs() -> Arc<Space> {
    Arc::new(Space::RationalsAbs)
}

fn sqrt2(space: &Arc<Space>) -> CPoint {
    build_generator(space, &GeneratorDescriptor::Sqrt { radicand: q("2") }).unwrap()
}

/// Newton's iteration for sqrt(2) from 2, reindexed to modulus 2^-n.
///
/// Iterates stay above sqrt(2), and `x - sqrt(2) = (x^2 - 2) / (x + sqrt(2)) <= (x^2 - 2) / 2`,
/// so term `n` is the first iterate with `(x^2 - 2) / 2 <= 2^-(n+1)`.
fn newton_sqrt2(space: &Arc<Space>) -> CPoint {
    let base: SpaceRef = space.clone();
    CPoint::new(base, |n| {
        let two = Rational::from_integer(2);
        let target = Rational::pow2_neg(n + 1);
        let mut x = two.clone();
        loop {
            let excess = (&(&x * &x) - &two).checked_div(&two).unwrap();
            if excess <= target {
                return Element::Rational(x);
            }
            x = (&x + &two.checked_div(&x).unwrap()).checked_div(&two).unwrap();
        }
    })
}

/// True when `sqrt(2)` provably lies in `[lo, hi]`, by exact squaring.
fn sqrt2_within(lo: &Rational, hi: &Rational) -> bool {
    let two = Rational::from_integer(2);
    (lo.is_negative() || lo * lo <= two) && hi * hi >= two && !hi.is_negative()
}

#[test]
fn sqrt2_against_embedded_three_halves() {
    let s = qabs();
    let y = sqrt2(&s);
    let base: SpaceRef = s.clone();
    let three_halves = embed(&base, el("3/2")).unwrap();
    let d = dist_approx(&y, &three_halves, 10).unwrap();
    // |d - (3/2 - sqrt2)| <= 2^-10  <=>  sqrt2 in [3/2 - d - 2^-10, 3/2 - d + 2^-10]
    let eps = Rational::pow2_neg(10);
    let lo = &(&q("3/2") - &d) - &eps;
    let hi = &(&q("3/2") - &d) + &eps;
    assert!(sqrt2_within(&lo, &hi), "d = {d}");
    // reference 3/2 - sqrt2 = 0.0857864...
    assert!(d > q("85/1000") && d < q("87/1000"));
}

#[test]
fn self_distance_is_small() {
    let s = qabs();
    let y = sqrt2(&s);
    for k in 0..20 {
        assert!(dist_approx(&y, &y, k).unwrap() <= Rational::pow2_neg(k));
    }
}

#[test]
fn two_adic_partial_sums_approach_minus_one() {
    let s = Arc::new(Space::padic(2).unwrap());
    let base: SpaceRef = s.clone();
    let y = build_generator(&s, &GeneratorDescriptor::GeometricSeries { first: None, ratio: None }).unwrap();
    let minus_one = embed(&base, el("-1")).unwrap();
    let d = dist_approx(&y, &minus_one, 20).unwrap();
    // term 21 is 2^22 - 1; v2(2^22) = 22
    assert_eq!(d, Rational::pow2_neg(22));
    assert!(d <= Rational::pow2_neg(20));

    let embedded_twelve = embed(&base, el("12")).unwrap();
    let zero = embed(&base, el("0")).unwrap();
    assert_eq!(dist_approx(&zero, &embedded_twelve, 10).unwrap(), q("1/4"));
}

#[test]
fn density_witness_examples() {
    let s = qabs();
    let base: SpaceRef = s.clone();
    let half = embed(&base, el("1/2")).unwrap();
    assert_eq!(approximate_by_base(&half, 7), el("1/2"));

    let y = sqrt2(&s);
    let x = rat(&approximate_by_base(&y, 10));
    let eps = Rational::pow2_neg(10);
    assert!(sqrt2_within(&(&x - &eps), &(&x + &eps)));
    // midpoint of the bracket after 12 halvings of [1, 2]
    let (lo, hi) = completion_core::spaces::sqrt_bracket(&q("2"), 12).unwrap();
    assert_eq!(x, lo.midpoint(&hi));

    let two = Arc::new(Space::padic(2).unwrap());
    let g = build_generator(&two, &GeneratorDescriptor::GeometricSeries { first: None, ratio: None }).unwrap();
    let x = approximate_by_base(&g, 5);
    // canonical witness is term 6 = 2^7 - 1, at 2-adic distance 2^-7 from -1
    assert_eq!(x, el("127"));
    assert_eq!(two.dist(&x, &el("-1")).unwrap(), Rational::pow2_neg(7));
    assert!(Rational::pow2_neg(7) <= Rational::pow2_neg(5));
}

#[test]
fn limit_of_embedded_rational_sequence() {
    let s = qabs();
    let base: SpaceRef = s.clone();
    let c = Completion::new(base.clone());
    // a_i = 1 - 2^-(i+1) is regular and tends to 1
    let a = CPoint::new(base.clone(), |i| Element::Rational(Rational::one() - Rational::pow2_neg(i + 1)));
    let emb = c.embedding();
    let a2 = a.clone();
    let z = c.limit(Arc::new(move |i| emb.apply(&a2.at(i)))).unwrap();
    for i in 0..=12 {
        let yi = c.embed(a.at(i));
        for k in 0..=16 {
            let bound = Rational::from_integer(3) * Rational::pow2_neg(i) + Rational::pow2_neg(k);
            assert!(c.dist_approx(&z, &yi, k).unwrap() <= bound);
        }
    }
    let mut prev = None;
    for k in [2, 6, 10, 14, 18] {
        let d = c.dist_approx(&z, &a, k).unwrap();
        assert!(d <= Rational::pow2_neg(k));
        if let Some(p) = prev {
            assert!(d <= p);
        }
        prev = Some(d);
    }
    check_regularity(&z, 24).unwrap();
}

fn rational_space_points() -> Vec<(Arc<Space>, Vec<CPoint>)> {
    let spaces = vec![
        Space::RationalsAbs,
        Space::padic(2).unwrap(),
        Space::padic(3).unwrap(),
        Space::Product(Box::new(Space::RationalsAbs), Box::new(Space::padic(2).unwrap())),
    ];
    spaces
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let s = Arc::new(s);
            let pts = sample_points(&s, 1000 + i as u64, 12);
            (s, pts)
        })
        .collect()
}

#[test]
fn embedding_is_exactly_isometric() {
    for (s, _) in rational_space_points() {
        let base: SpaceRef = s.clone();
        let xs = s.sample(5, 30);
        for pair in xs.windows(2) {
            let a = embed(&base, pair[0].clone()).unwrap();
            let b = embed(&base, pair[1].clone()).unwrap();
            let exact = s.dist(&pair[0], &pair[1]).unwrap();
            for k in [0, 5, 12, 30] {
                assert_eq!(dist_approx(&a, &b, k).unwrap(), exact);
            }
        }
    }
}

#[test]
fn extension_is_isometric_and_commutes() {
    let k = 12;
    let bound = Rational::from_integer(2) * Rational::pow2_neg(k);
    for (s, pts) in rational_space_points() {
        let y_space = Completion::new(s.clone());
        let ext = Extension::new(y_space.clone(), y_space.embedding()).unwrap();
        let images: Vec<CPoint> = pts.iter().map(|y| ext.apply(y).unwrap()).collect();
        for i in 0..pts.len() {
            // extension of the canonical embedding stays near the identity
            let d = y_space.dist_approx(&images[i], &pts[i], k).unwrap();
            assert!(d <= bound, "{d}");
            for j in i + 1..pts.len() {
                let src = y_space.dist_approx(&pts[i], &pts[j], k).unwrap();
                let dst = y_space.dist_approx(&images[i], &images[j], k).unwrap();
                assert!((&dst - &src).abs() <= bound);
            }
        }

        let xs = s.sample(77, 20);
        let phi = |y: &CPoint| ext.apply(y);
        let report: CommuteReport =
            check_commutes(&y_space.embedding(), &y_space.embedding(), &phi, &xs, k).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.checked, 20);
    }
}

#[test]
fn shift_isometry_extension_commutes() {
    let s = qabs();
    let base: SpaceRef = s.clone();
    let y_space = Completion::new(base.clone());
    let z_space = Completion::new(base.clone());
    let b2 = base.clone();
    let shift = completion_core::IsometryMap::new(base.clone(), z_space, move |x| {
        CPoint::constant(b2.clone(), Element::Rational(x.as_rational().unwrap() + &Rational::one()))
    });
    let xs = vec![el("0"), el("1/2"), el("-3")];
    assert!(shift.check_isometry(&xs, 12).unwrap().passed());
    let phi = |y: &CPoint| extend_isometry(&y_space, &shift, y);
    let report = check_commutes(&y_space.embedding(), &shift, &phi, &xs, 12).unwrap();
    assert!(report.passed());
    // sqrt2 + 1 lands near 2.414...
    let image = phi(&sqrt2(&s)).unwrap();
    let x = rat(&image.at(30));
    assert!(sqrt2_within(&(&x - &q("1") - Rational::pow2_neg(20)), &(&x - &q("1") + Rational::pow2_neg(20))));
}

#[test]
fn bisection_and_newton_extensions_agree() {
    let s = qabs();
    let base: SpaceRef = s.clone();
    let bis = sqrt2(&s);
    let newton = newton_sqrt2(&s);
    check_regularity(&newton, 24).unwrap();
    for k in 0..=16 {
        assert!(dist_approx(&bis, &newton, k).unwrap() <= Rational::pow2_neg(k));
    }
    let y_space = Completion::new(base.clone());
    let phi_z = y_space.embedding();
    let e1 = extend_isometry(&y_space, &phi_z, &bis).unwrap();
    let e2 = extend_isometry(&y_space, &phi_z, &newton).unwrap();
    for k in 0..=16 {
        let bound = Rational::from_integer(3) * Rational::pow2_neg(k);
        assert!(y_space.dist_approx(&e1, &e2, k).unwrap() <= bound);
    }
}

#[test]
fn extension_rejects_mismatched_source() {
    let y_space = Completion::new(qabs());
    let other = Completion::new(Arc::new(Space::padic(2).unwrap()));
    assert!(Extension::new(y_space.clone(), other.embedding()).is_err());
    let y = CPoint::constant(Arc::new(Space::padic(2).unwrap()), el("1"));
    assert!(extend_isometry(&y_space, &y_space.embedding(), &y).is_err());
}

#[test]
fn roundtrip_identity_shifted_and_padic() {
    let k = 12;
    let s = qabs();
    let base: SpaceRef = s.clone();
    let canonical = EmbeddedCompletion::canonical(Completion::new(base.clone()));
    let xs = s.sample(3, 6);
    let seqs = sample_points(&s, 4, 6);

    let same = completion_iso_roundtrip(&canonical, &canonical, &xs, &seqs, k).unwrap();
    assert!(same.passed());
    assert!(same.max_deviation_a <= Rational::pow2_neg(k));

    let shifted = EmbeddedCompletion::canonical(Completion::new(base.clone()).with_index_shift(1));
    let report = completion_iso_roundtrip(&shifted, &canonical, &xs, &seqs, k).unwrap();
    assert!(report.passed(), "{report:?}");
    assert_eq!(report.checked, 24);

    let two = Arc::new(Space::padic(2).unwrap());
    let b2: SpaceRef = two.clone();
    let a = EmbeddedCompletion::canonical(Completion::new(b2.clone()));
    let b = EmbeddedCompletion::canonical(Completion::new(b2.clone()).with_index_shift(3));
    let report = completion_iso_roundtrip(&a, &b, &two.sample(8, 5), &sample_points(&two, 9, 5), k).unwrap();
    assert!(report.passed(), "{report:?}");
}

#[test]
fn density_and_completeness_per_space() {
    for (s, pts) in rational_space_points() {
        let base: SpaceRef = s.clone();
        let c = Completion::new(base.clone());
        for y in &pts {
            for k in 0..=16 {
                let x = approximate_by_base(y, k);
                let d = dist_approx(&embed(&base, x).unwrap(), y, k + 1).unwrap();
                assert!(d <= Rational::pow2_neg(k));
            }
            // tails: ys(i)_n = y_max(n, i), regular in the completion metric
            let y2 = y.clone();
            let b2 = base.clone();
            let tails = Arc::new(move |i: u32| {
                let y3 = y2.clone();
                CPoint::new(b2.clone(), move |n| y3.at(n.max(i)))
            });
            let z = c.limit(tails.clone()).unwrap();
            for i in 0..=12 {
                for k in [0, 4, 8, 12, 16] {
                    let bound = Rational::from_integer(3) * Rational::pow2_neg(i) + Rational::pow2_neg(k);
                    assert!(c.dist_approx(&z, &tails(i), k).unwrap() <= bound);
                }
            }
            assert!(c.dist_approx(&z, y, 16).unwrap() <= Rational::from_integer(2) * Rational::pow2_neg(16));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_limit_consistency(seed in any::<u64>(), k in 0u32..20) {
        for (s, _) in rational_space_points().into_iter().take(3) {
            let pts = sample_points(&s, seed, 2);
            let near = dist_approx(&pts[0], &pts[1], k).unwrap();
            let far = dist_approx(&pts[0], &pts[1], k + 4).unwrap();
            prop_assert!((&near - &far).abs() <= Rational::pow2_neg(k) + Rational::pow2_neg(k + 4));
        }
    }

    #[test]
    fn well_defined_on_close_points(seed in any::<u64>(), shift in 0u32..6) {
        // y and its re-indexed tail have distance zero; their extensions agree within 3 * 2^-k
        let s = qabs();
        let base: SpaceRef = s.clone();
        let y = sample_points(&s, seed, 1).pop().unwrap();
        let y2 = y.clone();
        let tail = CPoint::new(base.clone(), move |n| y2.at(n + shift));
        let c = Completion::new(base);
        let phi_z = c.embedding();
        let e1 = extend_isometry(&c, &phi_z, &y).unwrap();
        let e2 = extend_isometry(&c, &phi_z, &tail).unwrap();
        for k in [0, 6, 12] {
            prop_assert!(dist_approx(&y, &tail, k).unwrap() <= Rational::pow2_neg(k));
            let bound = Rational::from_integer(3) * Rational::pow2_neg(k);
            prop_assert!(c.dist_approx(&e1, &e2, k).unwrap() <= bound);
        }
    }
}
