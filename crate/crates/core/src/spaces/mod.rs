//! Concrete presented spaces and their JSON descriptors.
//!
//! | kind              | elements             | distance                         |
//! |-------------------|----------------------|----------------------------------|
//! | `rationals_abs`   | `"num/den"`          | `abs(x - y)`                     |
//! | `rationals_padic` | `"num/den"`          | `p^(-v_p(x - y))`                |
//! | `finite`          | label strings        | table lookup                     |
//! | `product`         | `[a, b]`             | `max(d1(a, a'), d2(b, b'))`      |

mod finite;
mod generators;
mod padic;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::metric::{Element, MetricSpace};
use crate::rational::Rational;

pub use finite::FiniteSpaceTable;
pub use generators::{
    build_generator, geometric_series_term, partial_sum_term, sample_points, sqrt_bisection,
    sqrt_bracket, GeneratorDescriptor, PointDescriptor,
};
pub use padic::{is_prime, padic_valuation, PAdicParams, Valuation};

pub const KINDS: [&str; 4] = ["rationals_abs", "rationals_padic", "finite", "product"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceDescriptor {
    RationalsAbs,
    RationalsPadic {
        p: u64,
    },
    Finite {
        labels: Vec<String>,
        /// Row-major `n * n` distance matrix.
        dist: Vec<Rational>,
    },
    Product {
        components: Vec<SpaceDescriptor>,
    },
}

impl SpaceDescriptor {
    /// Parses a descriptor, reporting unknown kinds by name.
    pub fn from_json(value: &Value) -> Result<Self> {
        let kind = value
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::InvalidArgument("space descriptor needs a string \"kind\"".into()))?;
        if !KINDS.contains(&kind) {
            return Err(Error::UnknownKind(kind.to_string()));
        }
        if let Some(components) = value.get("components").and_then(Value::as_array) {
            for c in components {
                Self::from_json(c)?;
            }
        }
        serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidArgument(format!("space descriptor: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Space {
    RationalsAbs,
    RationalsPadic(PAdicParams),
    Finite(FiniteSpaceTable),
    Product(Box<Space>, Box<Space>),
}

impl Space {
    pub fn padic(p: u64) -> Result<Self> {
        Ok(Space::RationalsPadic(PAdicParams::new(p)?))
    }

    /// Builds a space, validating finite tables exhaustively.
    pub fn from_descriptor(desc: &SpaceDescriptor) -> Result<Self> {
        Self::build(desc, true)
    }

    /// Like [`Space::from_descriptor`], but finite tables are only checked
    /// for shape, so a broken table can be handed to the axiom verifier.
    pub fn from_descriptor_unchecked(desc: &SpaceDescriptor) -> Result<Self> {
        Self::build(desc, false)
    }

    fn build(desc: &SpaceDescriptor, validate: bool) -> Result<Self> {
        Ok(match desc {
            SpaceDescriptor::RationalsAbs => Space::RationalsAbs,
            SpaceDescriptor::RationalsPadic { p } => Space::padic(*p)?,
            SpaceDescriptor::Finite { labels, dist } => {
                let table = if validate {
                    FiniteSpaceTable::new(labels.clone(), dist.clone())?
                } else {
                    FiniteSpaceTable::unchecked(labels.clone(), dist.clone())?
                };
                Space::Finite(table)
            }
            SpaceDescriptor::Product { components } => match components.as_slice() {
                [a, b] => Space::Product(
                    Box::new(Self::build(a, validate)?),
                    Box::new(Self::build(b, validate)?),
                ),
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "product needs exactly 2 components, got {}",
                        components.len()
                    )))
                }
            },
        })
    }

    pub fn descriptor(&self) -> SpaceDescriptor {
        match self {
            Space::RationalsAbs => SpaceDescriptor::RationalsAbs,
            Space::RationalsPadic(params) => SpaceDescriptor::RationalsPadic { p: params.p() },
            Space::Finite(t) => SpaceDescriptor::Finite {
                labels: t.labels().to_vec(),
                dist: t.matrix().to_vec(),
            },
            Space::Product(a, b) => SpaceDescriptor::Product {
                components: vec![a.descriptor(), b.descriptor()],
            },
        }
    }

    fn malformed(&self, detail: impl Into<String>) -> Error {
        Error::MalformedElement {
            space: self.key(),
            detail: detail.into(),
        }
    }

    fn rational_of<'a>(&self, e: &'a Element) -> Result<&'a Rational> {
        e.as_rational()
            .ok_or_else(|| self.malformed(format!("expected a rational, got {e}")))
    }

    fn sample_with(&self, rng: &mut ChaCha8Rng) -> Element {
        match self {
            Space::RationalsAbs | Space::RationalsPadic(_) => Element::Rational(random_rational(rng)),
            Space::Finite(t) => Element::Label(t.labels()[rng.gen_range(0..t.len())].clone()),
            Space::Product(a, b) => Element::Tuple(vec![a.sample_with(rng), b.sample_with(rng)]),
        }
    }
}

/// Numerators in `[-4096, 4096]`, denominators in `[1, 64]`.
pub(crate) fn random_rational(rng: &mut impl Rng) -> Rational {
    let num: i64 = rng.gen_range(-4096..=4096);
    let den: i64 = rng.gen_range(1..=64);
    Rational::new(num, den).expect("non-zero denominator")
}

/// A random rational with non-negative p-adic valuation.
pub(crate) fn random_padic_integer(rng: &mut impl Rng, p: u64) -> Rational {
    let num: i64 = rng.gen_range(-512..=512);
    let mut den = BigInt::from(rng.gen_range(1..=64i64));
    let p = BigInt::from(p);
    loop {
        let (quot, rem) = den.div_rem(&p);
        if !rem.is_zero() {
            break;
        }
        den = quot;
    }
    Rational::new(num, den).expect("non-zero denominator")
}

impl MetricSpace for Space {
    fn key(&self) -> String {
        serde_json::to_string(&self.descriptor()).expect("descriptor serializes")
    }

    fn dist(&self, x: &Element, y: &Element) -> Result<Rational> {
        match self {
            Space::RationalsAbs => {
                let (a, b) = (self.rational_of(x)?, self.rational_of(y)?);
                Ok((a - b).abs())
            }
            Space::RationalsPadic(params) => {
                let (a, b) = (self.rational_of(x)?, self.rational_of(y)?);
                Ok(params.dist(a, b))
            }
            Space::Finite(t) => {
                let i = t.index_of(x).ok_or_else(|| self.malformed(format!("unknown label {x}")))?;
                let j = t.index_of(y).ok_or_else(|| self.malformed(format!("unknown label {y}")))?;
                Ok(t.entry(i, j).clone())
            }
            Space::Product(a, b) => match (x, y) {
                (Element::Tuple(xs), Element::Tuple(ys)) if xs.len() == 2 && ys.len() == 2 => {
                    let d1 = a.dist(&xs[0], &ys[0])?;
                    let d2 = b.dist(&xs[1], &ys[1])?;
                    Ok(d1.max(d2))
                }
                _ => Err(self.malformed(format!("expected pairs, got {x} and {y}"))),
            },
        }
    }

    fn sample(&self, seed: u64, count: usize) -> Vec<Element> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample_with(&mut rng)).collect()
    }

    fn parse_element(&self, value: &Value) -> Result<Element> {
        match self {
            Space::RationalsAbs | Space::RationalsPadic(_) => {
                let q: Rational = match value {
                    Value::String(s) => s.parse()?,
                    Value::Number(n) if n.is_i64() => Rational::from_integer(n.as_i64().unwrap()),
                    other => return Err(self.malformed(format!("expected \"num/den\", got {other}"))),
                };
                Ok(Element::Rational(q))
            }
            Space::Finite(t) => {
                let label = value
                    .as_str()
                    .ok_or_else(|| self.malformed(format!("expected a label, got {value}")))?;
                let e = Element::Label(label.to_string());
                t.index_of(&e)
                    .ok_or_else(|| self.malformed(format!("unknown label {label:?}")))?;
                Ok(e)
            }
            Space::Product(a, b) => match value.as_array().map(Vec::as_slice) {
                Some([va, vb]) => Ok(Element::Tuple(vec![a.parse_element(va)?, b.parse_element(vb)?])),
                _ => Err(self.malformed(format!("expected a 2-element array, got {value}"))),
            },
        }
    }

    fn carrier(&self) -> Option<Vec<Element>> {
        match self {
            Space::Finite(t) => Some(t.elements()),
            Space::Product(a, b) => {
                let (ca, cb) = (a.carrier()?, b.carrier()?);
                Some(
                    ca.iter()
                        .flat_map(|x| cb.iter().map(move |y| Element::Tuple(vec![x.clone(), y.clone()])))
                        .collect(),
                )
            }
            _ => None,
        }
    }

    fn is_ultrametric(&self) -> bool {
        match self {
            Space::RationalsPadic(_) => true,
            Space::Product(a, b) => a.is_ultrametric() && b.is_ultrametric(),
            _ => false,
        }
    }
}
