//! Built-in regular sequences.
//!
//! Each generator produces a sequence with modulus `2^-n`:
//!
//! * `constant`: the embedding of a single element.
//! * `sqrt`: bisection for `sqrt(q)` on `rationals_abs`. Term `n` is the
//!   midpoint of a bracketing interval of width `2^-(n+1)`.
//! * `geometric_series`: partial sums of `first * ratio^i` in a p-adic space,
//!   with `v_p(first) >= 0` and `v_p(ratio) >= 1`.
//! * `partial_sums`: partial sums of `c_(i mod L) * p^i` for a cyclic list of
//!   coefficients with `v_p(c) >= 0`. Term `i` has valuation at least `i`.

use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{random_padic_integer, random_rational, PAdicParams, Space, SpaceDescriptor, Valuation};
use crate::completion::CPoint;
use crate::error::{Error, Result};
use crate::metric::{Element, MetricSpace, SpaceRef};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorDescriptor {
    Constant {
        value: Value,
    },
    Sqrt {
        radicand: Rational,
    },
    GeometricSeries {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        first: Option<Rational>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ratio: Option<Rational>,
    },
    PartialSums {
        coefficients: Vec<Rational>,
    },
}

impl GeneratorDescriptor {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorDescriptor::Constant { .. } => "constant",
            GeneratorDescriptor::Sqrt { .. } => "sqrt",
            GeneratorDescriptor::GeometricSeries { .. } => "geometric_series",
            GeneratorDescriptor::PartialSums { .. } => "partial_sums",
        }
    }
}

/// `{"base": <space>, "generator": <generator>}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointDescriptor {
    pub base: SpaceDescriptor,
    pub generator: GeneratorDescriptor,
}

impl PointDescriptor {
    pub fn build(&self) -> Result<(Arc<Space>, CPoint)> {
        let space = Arc::new(Space::from_descriptor(&self.base)?);
        let point = build_generator(&space, &self.generator)?;
        Ok((space, point))
    }
}

/// Bracket `[lo, hi]` around `sqrt(q)` after `steps` halvings of `[a, a + 1]`,
/// where `a = floor(sqrt(floor(q)))`.
pub fn sqrt_bracket(q: &Rational, steps: u32) -> Result<(Rational, Rational)> {
    if q.is_negative() {
        return Err(Error::NegativeSqrt(q.to_string()));
    }
    let floor = q.numer() / q.denom();
    let a = floor.sqrt();
    let mut lo = Rational::from_integer(a.clone());
    let mut hi = Rational::from_integer(a + 1);
    for _ in 0..steps {
        let mid = lo.midpoint(&hi);
        if &(&mid * &mid) <= q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Term `n` of the bisection sequence: within `2^-(n+2)` of `sqrt(q)`.
pub fn sqrt_bisection(q: &Rational, n: u32) -> Result<Rational> {
    let (lo, hi) = sqrt_bracket(q, n + 1)?;
    Ok(lo.midpoint(&hi))
}

/// `first * (1 - ratio^(n+1)) / (1 - ratio)`.
pub fn geometric_series_term(first: &Rational, ratio: &Rational, n: u32) -> Rational {
    let mut power = Rational::one();
    for _ in 0..=n {
        power = &power * ratio;
    }
    let one = Rational::one();
    let denom = &one - ratio;
    if denom.is_zero() {
        return first * &Rational::from_integer(n as i64 + 1);
    }
    (first * &(&one - &power))
        .checked_div(&denom)
        .expect("denominator checked non-zero")
}

/// `sum_{i=0}^{n} c_(i mod L) * p^i`.
pub fn partial_sum_term(coefficients: &[Rational], p: u64, n: u32) -> Rational {
    let p = Rational::from_integer(BigInt::from(p));
    let mut power = Rational::one();
    let mut sum = Rational::zero();
    for i in 0..=n as usize {
        sum = sum + &coefficients[i % coefficients.len()] * &power;
        power = &power * &p;
    }
    sum
}

fn mismatch(gen: &GeneratorDescriptor, space: &Space, detail: &str) -> Error {
    Error::GeneratorMismatch {
        generator: gen.name().to_string(),
        space: space.key(),
        detail: detail.to_string(),
    }
}

fn nonneg_valuation(params: &PAdicParams, q: &Rational) -> bool {
    match params.valuation(q) {
        Valuation::Infinite => true,
        Valuation::Finite(v) => v >= 0,
    }
}

/// Builds the point described by `gen` over `space`.
pub fn build_generator(space: &Arc<Space>, gen: &GeneratorDescriptor) -> Result<CPoint> {
    let base: SpaceRef = space.clone();
    match gen {
        GeneratorDescriptor::Constant { value } => {
            let x = space.parse_element(value)?;
            Ok(CPoint::constant(base, x))
        }
        GeneratorDescriptor::Sqrt { radicand } => {
            if !matches!(space.as_ref(), Space::RationalsAbs) {
                return Err(mismatch(gen, space, "sqrt needs rationals_abs"));
            }
            if radicand.is_negative() {
                return Err(Error::NegativeSqrt(radicand.to_string()));
            }
            let q = radicand.clone();
            Ok(CPoint::new(base, move |n| {
                Element::Rational(sqrt_bisection(&q, n).expect("radicand checked non-negative"))
            }))
        }
        GeneratorDescriptor::GeometricSeries { first, ratio } => {
            let Space::RationalsPadic(params) = space.as_ref() else {
                return Err(mismatch(gen, space, "geometric_series needs rationals_padic"));
            };
            let first = first.clone().unwrap_or_else(Rational::one);
            let ratio = ratio
                .clone()
                .unwrap_or_else(|| Rational::from_integer(BigInt::from(params.p())));
            if !nonneg_valuation(params, &first) {
                return Err(mismatch(gen, space, "first term must have v_p >= 0"));
            }
            match params.valuation(&ratio) {
                Valuation::Finite(v) if v < 1 => {
                    return Err(mismatch(gen, space, "ratio must have v_p >= 1"));
                }
                _ => {}
            }
            Ok(CPoint::new(base, move |n| {
                Element::Rational(geometric_series_term(&first, &ratio, n))
            }))
        }
        GeneratorDescriptor::PartialSums { coefficients } => {
            let Space::RationalsPadic(params) = space.as_ref() else {
                return Err(mismatch(gen, space, "partial_sums needs rationals_padic"));
            };
            if coefficients.is_empty() {
                return Err(mismatch(gen, space, "coefficient list is empty"));
            }
            if let Some(c) = coefficients.iter().find(|c| !nonneg_valuation(params, c)) {
                return Err(mismatch(gen, space, &format!("coefficient {c} has negative valuation")));
            }
            let coefficients = coefficients.clone();
            let p = params.p();
            Ok(CPoint::new(base, move |n| {
                Element::Rational(partial_sum_term(&coefficients, p, n))
            }))
        }
    }
}

/// `count` seeded regular sequences over `space`, mixing every generator the
/// space supports.
pub fn sample_points(space: &Arc<Space>, seed: u64, count: usize) -> Vec<CPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| sample_point(space, &mut rng, i)).collect()
}

fn sample_point(space: &Arc<Space>, rng: &mut ChaCha8Rng, i: usize) -> CPoint {
    let base: SpaceRef = space.clone();
    match space.as_ref() {
        Space::RationalsAbs => match i % 3 {
            0 => CPoint::constant(base, Element::Rational(random_rational(rng))),
            1 => {
                let q = random_rational(rng).abs();
                CPoint::new(base, move |n| Element::Rational(sqrt_bisection(&q, n).unwrap()))
            }
            _ => {
                // c + s * 2^-(n+1) with |s| <= 1
                let c = random_rational(rng);
                let s = Rational::new(rng.gen_range(-16..=16i64), 16).unwrap();
                CPoint::new(base, move |n| Element::Rational(&c + &(&s * &Rational::pow2_neg(n + 1))))
            }
        },
        Space::RationalsPadic(params) => {
            let p = params.p();
            match i % 3 {
                0 => CPoint::constant(base, Element::Rational(random_rational(rng))),
                1 => {
                    let first = random_padic_integer(rng, p);
                    let unit = random_padic_integer(rng, p);
                    let ratio = &unit * &Rational::from_integer(BigInt::from(p));
                    CPoint::new(base, move |n| {
                        Element::Rational(geometric_series_term(&first, &ratio, n))
                    })
                }
                _ => {
                    let len = rng.gen_range(1..=4);
                    let coefficients: Vec<Rational> =
                        (0..len).map(|_| random_padic_integer(rng, p)).collect();
                    CPoint::new(base, move |n| {
                        Element::Rational(partial_sum_term(&coefficients, p, n))
                    })
                }
            }
        }
        Space::Finite(table) => {
            // term n may sit anywhere within 2^-n of the eventual value
            let tail = rng.gen_range(0..table.len());
            let horizon = table.stabilization_index() + 1;
            let prefix: Vec<Element> = (0..horizon)
                .map(|n| {
                    let pick = rng.gen_range(0..table.len());
                    let idx = if table.entry(pick, tail) <= &Rational::pow2_neg(n) {
                        pick
                    } else {
                        tail
                    };
                    Element::Label(table.labels()[idx].clone())
                })
                .collect();
            let last = Element::Label(table.labels()[tail].clone());
            CPoint::new(base, move |n| {
                prefix.get(n as usize).cloned().unwrap_or_else(|| last.clone())
            })
        }
        Space::Product(a, b) => {
            let a = Arc::new((**a).clone());
            let b = Arc::new((**b).clone());
            let pa = sample_point(&a, rng, i);
            let pb = sample_point(&b, rng, i + 1);
            CPoint::new(base, move |n| Element::Tuple(vec![pa.at(n), pb.at(n)]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::{check_regularity, dist_approx, embed};
    use serde_json::json;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn sqrt_two_bisection() {
        // 20 halvings past the first: width 2^-21, midpoint within 2^-22
        let x = sqrt_bisection(&q("2"), 20).unwrap();
        let err = (&(&x * &x) - &q("2")).abs();
        let bound = Rational::from_integer(3) * Rational::pow2_neg(21) + Rational::pow2_neg(42);
        assert!(err <= bound);
        let (lo, hi) = sqrt_bracket(&q("2"), 12).unwrap();
        assert_eq!(&hi - &lo, Rational::pow2_neg(12));
        assert!(&lo * &lo <= q("2") && &hi * &hi >= q("2"));
    }

    #[test]
    fn sqrt_brackets_small_and_large_radicands() {
        for s in ["0", "1/9", "1", "10", "1000001/4"] {
            let r = q(s);
            let (lo, hi) = sqrt_bracket(&r, 30).unwrap();
            assert!(&lo * &lo <= r && r <= &hi * &hi, "{s}");
        }
        assert!(matches!(sqrt_bracket(&q("-1"), 3), Err(Error::NegativeSqrt(_))));
    }

    #[test]
    fn two_adic_geometric_series() {
        let space = Arc::new(Space::padic(2).unwrap());
        let gen = GeneratorDescriptor::GeometricSeries { first: None, ratio: Some(q("2")) };
        let y = build_generator(&space, &gen).unwrap();
        for n in 0..20 {
            let expected = Rational::from_integer((1i64 << (n + 1)) - 1);
            assert_eq!(y.at(n), Element::Rational(expected));
        }
        let base: SpaceRef = space.clone();
        let minus_one = embed(&base, Element::Rational(q("-1"))).unwrap();
        for k in 0..24 {
            assert_eq!(dist_approx(&y, &minus_one, k).unwrap(), Rational::pow2_neg(k + 2));
        }
    }

    #[test]
    fn generator_errors() {
        let abs = Arc::new(Space::RationalsAbs);
        let padic = Arc::new(Space::padic(3).unwrap());
        let sqrt = GeneratorDescriptor::Sqrt { radicand: q("-2") };
        assert!(matches!(build_generator(&abs, &sqrt), Err(Error::NegativeSqrt(_))));
        let sqrt = GeneratorDescriptor::Sqrt { radicand: q("2") };
        assert!(matches!(build_generator(&padic, &sqrt), Err(Error::GeneratorMismatch { .. })));
        let geo = GeneratorDescriptor::GeometricSeries { first: None, ratio: None };
        assert!(matches!(build_generator(&abs, &geo), Err(Error::GeneratorMismatch { .. })));
        let geo = GeneratorDescriptor::GeometricSeries { first: None, ratio: Some(q("2")) };
        assert!(build_generator(&padic, &geo).is_err());
        let sums = GeneratorDescriptor::PartialSums { coefficients: vec![q("1/3")] };
        assert!(build_generator(&padic, &sums).is_err());
        let sums = GeneratorDescriptor::PartialSums { coefficients: vec![] };
        assert!(build_generator(&padic, &sums).is_err());
    }

    #[test]
    fn point_descriptor_parses() {
        let d: PointDescriptor = serde_json::from_value(json!({
            "base": {"kind": "rationals_abs"},
            "generator": {"kind": "constant", "value": "1/2"}
        }))
        .unwrap();
        let (_, y) = d.build().unwrap();
        assert_eq!(y.at(0), Element::Rational(q("1/2")));
        assert_eq!(y.at(33), Element::Rational(q("1/2")));
    }

    #[test]
    fn sampled_points_are_regular() {
        let spaces = [
            Space::RationalsAbs,
            Space::padic(2).unwrap(),
            Space::padic(5).unwrap(),
            Space::Product(Box::new(Space::RationalsAbs), Box::new(Space::padic(3).unwrap())),
        ];
        for s in spaces {
            let s = Arc::new(s);
            for y in sample_points(&s, 99, 12) {
                check_regularity(&y, 24).unwrap();
            }
        }
    }
}
