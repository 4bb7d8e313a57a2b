//! Presented metric spaces with exact rational distances.
//!
//! A presented space knows how to measure two of its elements exactly and how
//! to draw a deterministic pseudo-random sample of elements from a seed. All
//! approximation lives one layer up, in [`crate::completion`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// An element of a presented space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Element {
    Rational(Rational),
    Label(String),
    Tuple(Vec<Element>),
}

impl Element {
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Element::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Element::Rational(q) => Value::String(q.to_string()),
            Element::Label(l) => Value::String(l.clone()),
            Element::Tuple(items) => Value::Array(items.iter().map(Element::to_json).collect()),
        }
    }
}

impl From<Rational> for Element {
    fn from(q: Rational) -> Self {
        Element::Rational(q)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Rational(q) => write!(f, "{q}"),
            Element::Label(l) => f.write_str(l),
            Element::Tuple(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

/// A metric space whose distance function is exact and rational-valued.
///
/// Implementations must be pure: `dist` and `sample` depend only on their
/// arguments.
pub trait MetricSpace: Send + Sync + fmt::Debug {
    /// Canonical identity of the space. Two presentations with equal keys are
    /// treated as the same space.
    fn key(&self) -> String;

    fn dist(&self, x: &Element, y: &Element) -> Result<Rational>;

    /// `count` elements drawn deterministically from `seed`.
    fn sample(&self, seed: u64, count: usize) -> Vec<Element>;

    fn parse_element(&self, value: &Value) -> Result<Element>;

    /// Every element, when the carrier is finite.
    fn carrier(&self) -> Option<Vec<Element>> {
        None
    }

    /// Whether the strong triangle inequality is expected to hold.
    fn is_ultrametric(&self) -> bool {
        false
    }
}

pub type SpaceRef = Arc<dyn MetricSpace>;

pub fn same_space(a: &dyn MetricSpace, b: &dyn MetricSpace) -> Result<()> {
    if std::ptr::addr_eq(a, b) {
        return Ok(());
    }
    let (left, right) = (a.key(), b.key());
    if left == right {
        Ok(())
    } else {
        Err(Error::SpaceMismatch { left, right })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomOutcome {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl AxiomOutcome {
    pub fn pass() -> Self {
        AxiomOutcome {
            status: Status::Pass,
            witness: None,
            detail: None,
        }
    }

    pub fn fail(witness: Vec<Value>, detail: impl Into<String>) -> Self {
        AxiomOutcome {
            status: Status::Fail,
            witness: Some(witness),
            detail: Some(detail.into()),
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Per-axiom verdicts, serialized as `{axiom: {status, witness?}}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct AxiomReport {
    pub axioms: BTreeMap<String, AxiomOutcome>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.axioms.values().all(AxiomOutcome::passed)
    }

    pub fn get(&self, axiom: &str) -> Option<&AxiomOutcome> {
        self.axioms.get(axiom)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&String, &AxiomOutcome)> {
        self.axioms.iter().filter(|(_, o)| !o.passed())
    }

    pub(crate) fn record(&mut self, axiom: &str, outcome: AxiomOutcome) {
        self.axioms.insert(axiom.to_string(), outcome);
    }
}

pub const ZERO_SELF_DISTANCE: &str = "zero_self_distance";
pub const NONNEGATIVITY: &str = "nonnegativity";
pub const SYMMETRY: &str = "symmetry";
pub const TRIANGLE: &str = "triangle_inequality";
pub const ULTRAMETRIC: &str = "ultrametric";
pub const INDISCERNIBLES: &str = "indiscernibles";

/// First failure per axiom wins; later failures are not recorded.
#[derive(Default)]
struct AxiomTracker {
    failures: BTreeMap<&'static str, AxiomOutcome>,
}

impl AxiomTracker {
    fn check(&mut self, axiom: &'static str, ok: bool, witness: &[&Element], detail: impl FnOnce() -> String) {
        if !ok && !self.failures.contains_key(axiom) {
            let witness = witness.iter().map(|e| e.to_json()).collect();
            self.failures.insert(axiom, AxiomOutcome::fail(witness, detail()));
        }
    }
}

/// Checks the metric axioms exactly.
///
/// Finite carriers are checked over every pair and triple. Infinite carriers
/// are checked on `n_samples` seeded triples, including all three rotations
/// of each triangle inequality.
pub fn verify_metric_axioms(space: &dyn MetricSpace, seed: u64, n_samples: usize) -> Result<AxiomReport> {
    if n_samples < 3 {
        return Err(Error::InvalidArgument(format!(
            "n_samples must be at least 3 (got {n_samples})"
        )));
    }
    let mut tracker = AxiomTracker::default();
    let ultra = space.is_ultrametric();

    let triples: Vec<[Element; 3]> = match space.carrier() {
        Some(carrier) => {
            let mut out = Vec::with_capacity(carrier.len().pow(3));
            for x in &carrier {
                for y in &carrier {
                    for z in &carrier {
                        out.push([x.clone(), y.clone(), z.clone()]);
                    }
                }
            }
            out
        }
        None => {
            let pool = space.sample(seed, 3 * n_samples);
            pool.chunks_exact(3)
                .map(|c| [c[0].clone(), c[1].clone(), c[2].clone()])
                .collect()
        }
    };

    for [x, y, z] in &triples {
        let dxy = space.dist(x, y)?;
        let dyx = space.dist(y, x)?;
        let dyz = space.dist(y, z)?;
        let dxz = space.dist(x, z)?;
        let dzy = space.dist(z, y)?;
        let dxx = space.dist(x, x)?;

        tracker.check(ZERO_SELF_DISTANCE, dxx.is_zero(), &[x], || format!("d(x,x) = {dxx}"));
        for (d, a, b) in [(&dxy, x, y), (&dyz, y, z), (&dxz, x, z)] {
            tracker.check(NONNEGATIVITY, !d.is_negative(), &[a, b], || format!("d = {d}"));
        }
        tracker.check(SYMMETRY, dxy == dyx, &[x, y], || format!("d(x,y) = {dxy}, d(y,x) = {dyx}"));

        tracker.check(TRIANGLE, dxz <= &dxy + &dyz, &[x, y, z], || {
            format!("d(x,z) = {dxz} > d(x,y) + d(y,z) = {}", &dxy + &dyz)
        });
        // the other two rotations of the same triangle
        tracker.check(TRIANGLE, dxy <= &dxz + &dzy, &[x, z, y], || {
            format!("d(x,y) = {dxy} > d(x,z) + d(z,y) = {}", &dxz + &dzy)
        });
        tracker.check(TRIANGLE, dyz <= &dyx + &dxz, &[y, x, z], || {
            format!("d(y,z) = {dyz} > d(y,x) + d(x,z) = {}", &dyx + &dxz)
        });

        if ultra {
            let m = dxy.clone().max(dyz.clone());
            tracker.check(ULTRAMETRIC, dxz <= m, &[x, y, z], || {
                format!("d(x,z) = {dxz} > max(d(x,y), d(y,z)) = {m}")
            });
        }
    }

    let mut report = AxiomReport::default();
    let mut axioms = vec![ZERO_SELF_DISTANCE, NONNEGATIVITY, SYMMETRY, TRIANGLE];
    if ultra {
        axioms.push(ULTRAMETRIC);
    }

    if let Some(carrier) = space.carrier() {
        // d(x,y) = 0 implies x = y, only decidable by exhaustion
        for (i, x) in carrier.iter().enumerate() {
            for y in &carrier[i + 1..] {
                let d = space.dist(x, y)?;
                tracker.check(INDISCERNIBLES, !d.is_zero(), &[x, y], || {
                    "distinct elements at distance 0".to_string()
                });
            }
        }
        axioms.push(INDISCERNIBLES);
    }

    for axiom in axioms {
        let outcome = tracker
            .failures
            .remove(axiom)
            .unwrap_or_else(AxiomOutcome::pass);
        report.record(axiom, outcome);
    }
    Ok(report)
}

/// A space with a distance that may only be approximable: `dist_approx(p, q, k)`
/// is within `2^-k` of the true distance.
pub trait ApproxMetric {
    type Point: Clone + Send + Sync + 'static;

    fn dist_approx(&self, p: &Self::Point, q: &Self::Point, k: u32) -> Result<Rational>;

    /// True when `dist_approx` ignores `k` and returns the exact distance.
    fn is_exact(&self) -> bool {
        false
    }

    fn describe(&self) -> String;
}

/// A presented space used as an isometry target; distances are exact.
#[derive(Debug, Clone)]
pub struct BaseSpace(pub SpaceRef);

impl ApproxMetric for BaseSpace {
    type Point = Element;

    fn dist_approx(&self, p: &Element, q: &Element, _k: u32) -> Result<Rational> {
        self.0.dist(p, q)
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        self.0.key()
    }
}

pub type PointFn<P> = Arc<dyn Fn(&Element) -> P + Send + Sync>;

/// A distance-preserving map from a presented space into `T`.
///
/// Distance preservation is a contract of the constructor; use
/// [`IsometryMap::check_isometry`] to spot-check it on samples.
pub struct IsometryMap<T: ApproxMetric> {
    pub source: SpaceRef,
    pub target: T,
    apply: PointFn<T::Point>,
}

impl<T: ApproxMetric + Clone> Clone for IsometryMap<T> {
    fn clone(&self) -> Self {
        IsometryMap {
            source: self.source.clone(),
            target: self.target.clone(),
            apply: self.apply.clone(),
        }
    }
}

impl<T: ApproxMetric> fmt::Debug for IsometryMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IsometryMap")
            .field("source", &self.source.key())
            .field("target", &self.target.describe())
            .finish()
    }
}

impl<T: ApproxMetric> IsometryMap<T> {
    pub fn new(
        source: SpaceRef,
        target: T,
        apply: impl Fn(&Element) -> T::Point + Send + Sync + 'static,
    ) -> Self {
        IsometryMap {
            source,
            target,
            apply: Arc::new(apply),
        }
    }

    pub fn apply(&self, x: &Element) -> T::Point {
        (self.apply)(x)
    }

    pub fn point_fn(&self) -> PointFn<T::Point> {
        self.apply.clone()
    }

    /// Compares source and target distances over every pair of `xs`.
    ///
    /// Exact targets must match exactly; approximate targets must match within
    /// `2^-k` (the approximation error of a single `dist_approx`).
    pub fn check_isometry(&self, xs: &[Element], k: u32) -> Result<IsometryReport> {
        let slack = if self.target.is_exact() {
            Rational::zero()
        } else {
            Rational::pow2_neg(k)
        };
        let images: Vec<T::Point> = xs.iter().map(|x| self.apply(x)).collect();
        let mut report = IsometryReport {
            pairs_checked: 0,
            max_deviation: Rational::zero(),
            allowed: slack.clone(),
            violations: Vec::new(),
        };
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                let source = self.source.dist(&xs[i], &xs[j])?;
                let target = self.target.dist_approx(&images[i], &images[j], k)?;
                let deviation = (&target - &source).abs();
                report.pairs_checked += 1;
                if deviation > slack {
                    report.violations.push(IsometryViolation {
                        x: xs[i].clone(),
                        y: xs[j].clone(),
                        source_distance: source,
                        target_distance: target,
                    });
                }
                report.max_deviation = report.max_deviation.max(deviation);
            }
        }
        Ok(report)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IsometryViolation {
    pub x: Element,
    pub y: Element,
    pub source_distance: Rational,
    pub target_distance: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsometryReport {
    pub pairs_checked: usize,
    pub max_deviation: Rational,
    pub allowed: Rational,
    pub violations: Vec<IsometryViolation>,
}

impl IsometryReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}
