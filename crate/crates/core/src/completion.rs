//! The Cauchy-sequence completion of a presented metric space.
//!
//! A point of the completion is a *regular* sequence: `d(x_m, x_n) <= 2^-m + 2^-n`
//! for all indices. With that fixed modulus every bound below is explicit:
//!
//! * `dist_approx(y, y', k)` reads both sequences at index `k + 1`, so the
//!   answer is within `2 * 2^-(k+1) = 2^-k` of the limit distance.
//! * `limit` takes the diagonal `z_n = ys(n + 2)_(n + 2)`. Then
//!   `d(z_m, z_n) <= 2^-(m+1) + 2^-(n+1)`, so `z` is regular, and
//!   `d(z, ys(i)) <= 2^-i`.
//! * The universal extension of an isometry `X -> Z` sends `y` to the limit
//!   in `Z` of the images of `y`'s terms.
//!
//! Points have no decidable equality. Use [`dist_approx`] or [`apart`].

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{same_space, ApproxMetric, Element, IsometryMap, SpaceRef};
use crate::rational::Rational;

/// Default largest index used when spot-checking regularity.
pub const DEFAULT_CHECK_DEPTH: u32 = 24;

/// A lazily evaluated sequence of points, indexed from 0.
pub type PointSeq<P> = Arc<dyn Fn(u32) -> P + Send + Sync>;

/// A point of the completion: a regular sequence in the base space.
#[derive(Clone)]
pub struct CPoint {
    base: SpaceRef,
    seq: PointSeq<Element>,
}

impl CPoint {
    /// Wraps a sequence. The caller promises regularity; see [`check_regularity`].
    pub fn new(base: SpaceRef, seq: impl Fn(u32) -> Element + Send + Sync + 'static) -> Self {
        CPoint {
            base,
            seq: Arc::new(seq),
        }
    }

    pub fn from_seq(base: SpaceRef, seq: PointSeq<Element>) -> Self {
        CPoint { base, seq }
    }

    /// The constant sequence at `x`, with no validation of `x`.
    pub fn constant(base: SpaceRef, x: Element) -> Self {
        CPoint::new(base, move |_| x.clone())
    }

    pub fn at(&self, n: u32) -> Element {
        (self.seq)(n)
    }

    pub fn base(&self) -> &SpaceRef {
        &self.base
    }
}

impl fmt::Debug for CPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CPoint")
            .field("base", &self.base.key())
            .field("at(0)", &self.at(0))
            .finish()
    }
}

/// Embeds `x` as the constant sequence. Fails if `x` is not an element of `space`.
pub fn embed(space: &SpaceRef, x: Element) -> Result<CPoint> {
    space.dist(&x, &x)?;
    Ok(CPoint::constant(space.clone(), x))
}

/// Parses an element from its JSON encoding and embeds it.
pub fn embed_json(space: &SpaceRef, value: &serde_json::Value) -> Result<CPoint> {
    let x = space.parse_element(value)?;
    embed(space, x)
}

/// Distance between two completion points to within `2^-k`.
pub fn dist_approx(y: &CPoint, y2: &CPoint, k: u32) -> Result<Rational> {
    same_space(y.base.as_ref(), y2.base.as_ref())?;
    y.base.dist(&y.at(k + 1), &y2.at(k + 1))
}

/// Certifies `y != y2` when the approximate distance exceeds twice the error.
pub fn apart(y: &CPoint, y2: &CPoint, k: u32) -> Result<bool> {
    Ok(dist_approx(y, y2, k)? > Rational::pow2_neg(k) * Rational::from_integer(2))
}

/// A base element within `2^-k` of `y`: the term at index `k + 1`.
pub fn approximate_by_base(y: &CPoint, k: u32) -> Element {
    y.at(k + 1)
}

/// Exact spot-check of `d(x_m, x_n) <= 2^-m + 2^-n` for all `m < n <= depth`.
pub fn check_regularity(y: &CPoint, depth: u32) -> Result<()> {
    let terms: Vec<Element> = (0..=depth).map(|n| y.at(n)).collect();
    for m in 0..=depth {
        for n in m + 1..=depth {
            let d = y.base.dist(&terms[m as usize], &terms[n as usize])?;
            let bound = Rational::pow2_neg(m) + Rational::pow2_neg(n);
            if d > bound {
                return Err(Error::RegularityViolation {
                    i: m,
                    j: n,
                    observed: d.to_string(),
                    bound: bound.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// A complete space: every regular sequence of points has a limit.
pub trait CompleteSpace: ApproxMetric {
    /// Limit of a sequence regular in this space's metric. The result `z`
    /// satisfies `dist_approx(z, ys(i), k) <= 3 * 2^-i + 2^-k`.
    fn limit(&self, ys: PointSeq<Self::Point>) -> Result<Self::Point>;
}

/// The completion of `base`, presented by regular sequences.
///
/// `index_shift` lets one completion read its points' sequences from a later
/// index: point `p` stands for the regular sequence `n -> p.at(n + shift)`.
/// The canonical presentation has shift 0.
#[derive(Debug, Clone)]
pub struct Completion {
    base: SpaceRef,
    index_shift: u32,
    check_depth: u32,
}

impl Completion {
    pub fn new(base: SpaceRef) -> Self {
        Completion {
            base,
            index_shift: 0,
            check_depth: DEFAULT_CHECK_DEPTH,
        }
    }

    pub fn with_index_shift(mut self, shift: u32) -> Self {
        self.index_shift = shift;
        self
    }

    pub fn with_check_depth(mut self, depth: u32) -> Self {
        self.check_depth = depth;
        self
    }

    pub fn base(&self) -> &SpaceRef {
        &self.base
    }

    pub fn index_shift(&self) -> u32 {
        self.index_shift
    }

    /// Term `n` of the regular sequence that `p` stands for.
    pub fn eval(&self, p: &CPoint, n: u32) -> Element {
        p.at(n + self.index_shift)
    }

    pub fn embed(&self, x: Element) -> CPoint {
        CPoint::constant(self.base.clone(), x)
    }

    /// The canonical embedding of the base space as constant sequences.
    pub fn embedding(&self) -> IsometryMap<Completion> {
        let base = self.base.clone();
        IsometryMap::new(self.base.clone(), self.clone(), move |x| {
            CPoint::constant(base.clone(), x.clone())
        })
    }

    pub fn approximate_by_base(&self, p: &CPoint, k: u32) -> Element {
        self.eval(p, k + 1)
    }

    /// Spot-checks `dist_approx(ys(i), ys(j), depth) <= 2^-i + 2^-j + 2^-depth`
    /// over all `i < j <= depth`; the last term is the approximation slack.
    pub fn check_sequence(&self, ys: &PointSeq<CPoint>) -> Result<()> {
        let depth = self.check_depth;
        let mut terms = Vec::with_capacity(depth as usize + 1);
        for i in 0..=depth {
            let p = ys(i);
            same_space(self.base.as_ref(), p.base.as_ref())?;
            // the index dist_approx(., ., depth) reads
            terms.push(self.eval(&p, depth + 1));
        }
        let slack = Rational::pow2_neg(depth);
        for i in 0..=depth {
            for j in i + 1..=depth {
                let d = self.base.dist(&terms[i as usize], &terms[j as usize])?;
                let bound = Rational::pow2_neg(i) + Rational::pow2_neg(j) + &slack;
                if d > bound {
                    return Err(Error::RegularityViolation {
                        i,
                        j,
                        observed: d.to_string(),
                        bound: bound.to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

impl ApproxMetric for Completion {
    type Point = CPoint;

    fn dist_approx(&self, p: &CPoint, q: &CPoint, k: u32) -> Result<Rational> {
        same_space(self.base.as_ref(), p.base.as_ref())?;
        same_space(self.base.as_ref(), q.base.as_ref())?;
        self.base.dist(&self.eval(p, k + 1), &self.eval(q, k + 1))
    }

    fn describe(&self) -> String {
        if self.index_shift == 0 {
            format!("completion({})", self.base.key())
        } else {
            format!("completion({}, shift {})", self.base.key(), self.index_shift)
        }
    }
}

impl CompleteSpace for Completion {
    fn limit(&self, ys: PointSeq<CPoint>) -> Result<CPoint> {
        self.check_sequence(&ys)?;
        let shift = self.index_shift;
        Ok(CPoint::new(self.base.clone(), move |m| {
            let n = m.saturating_sub(shift) + 2;
            ys(n).at(n + shift)
        }))
    }
}

/// The extension of `phi_z` along the embedding of `X` into `domain`,
/// evaluated at `y`: the `Z`-limit of `phi_z` applied to the terms of `y`.
pub fn extend_isometry<Z: CompleteSpace>(
    domain: &Completion,
    phi_z: &IsometryMap<Z>,
    y: &CPoint,
) -> Result<Z::Point> {
    same_space(domain.base.as_ref(), phi_z.source.as_ref())?;
    same_space(domain.base.as_ref(), y.base.as_ref())?;
    let apply = phi_z.point_fn();
    let domain = domain.clone();
    let y = y.clone();
    phi_z
        .target
        .limit(Arc::new(move |i| apply(&domain.eval(&y, i))))
}

/// The extension map as a reusable value.
pub struct Extension<Z: CompleteSpace> {
    pub domain: Completion,
    pub phi_z: IsometryMap<Z>,
}

impl<Z: CompleteSpace + Clone> Clone for Extension<Z> {
    fn clone(&self) -> Self {
        Extension {
            domain: self.domain.clone(),
            phi_z: self.phi_z.clone(),
        }
    }
}

impl<Z: CompleteSpace> Extension<Z> {
    pub fn new(domain: Completion, phi_z: IsometryMap<Z>) -> Result<Self> {
        same_space(domain.base.as_ref(), phi_z.source.as_ref())?;
        Ok(Extension { domain, phi_z })
    }

    pub fn apply(&self, y: &CPoint) -> Result<Z::Point> {
        extend_isometry(&self.domain, &self.phi_z, y)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CommuteViolation {
    pub x: Element,
    pub observed: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommuteReport {
    pub checked: usize,
    pub precision: u32,
    pub bound: Rational,
    pub max_observed: Rational,
    pub violations: Vec<CommuteViolation>,
}

impl CommuteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `phi(phi_y(x))` against `phi_z(x)` to within `2^-k` on each sample.
pub fn check_commutes<Z: ApproxMetric>(
    phi_y: &IsometryMap<Completion>,
    phi_z: &IsometryMap<Z>,
    phi: &dyn Fn(&CPoint) -> Result<Z::Point>,
    xs: &[Element],
    k: u32,
) -> Result<CommuteReport> {
    same_space(phi_y.source.as_ref(), phi_z.source.as_ref())?;
    if xs.is_empty() {
        return Err(Error::InvalidArgument("check_commutes needs at least one sample".into()));
    }
    let bound = Rational::pow2_neg(k);
    let mut report = CommuteReport {
        checked: 0,
        precision: k,
        bound: bound.clone(),
        max_observed: Rational::zero(),
        violations: Vec::new(),
    };
    for x in xs {
        let via_y = phi(&phi_y.apply(x))?;
        let direct = phi_z.apply(x);
        let observed = phi_z.target.dist_approx(&via_y, &direct, k)?;
        report.checked += 1;
        if observed > bound {
            report.violations.push(CommuteViolation {
                x: x.clone(),
                observed: observed.clone(),
            });
        }
        report.max_observed = report.max_observed.max(observed);
    }
    Ok(report)
}

/// A completion of `X` together with its embedding of `X`.
#[derive(Debug, Clone)]
pub struct EmbeddedCompletion {
    pub space: Completion,
    pub embedding: IsometryMap<Completion>,
}

impl EmbeddedCompletion {
    pub fn canonical(space: Completion) -> Self {
        let embedding = space.embedding();
        EmbeddedCompletion { space, embedding }
    }

    /// The point of this completion that `y`'s sequence converges to.
    pub fn point_of(&self, y: &CPoint) -> Result<CPoint> {
        let apply = self.embedding.point_fn();
        let y = y.clone();
        self.space.limit(Arc::new(move |i| apply(&y.at(i))))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundTripReport {
    pub checked: usize,
    pub precision: u32,
    pub bound: Rational,
    pub max_deviation_a: Rational,
    pub max_deviation_b: Rational,
    pub violations: usize,
}

impl RoundTripReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Builds `phi: A -> B` and `psi: B -> A` by extension and checks that both
/// composites fix sampled points to within `2 * 2^-k`.
///
/// Samples in each completion are the embeddings of `xs` and the limits of
/// the sequences in `seqs`.
pub fn completion_iso_roundtrip(
    a: &EmbeddedCompletion,
    b: &EmbeddedCompletion,
    xs: &[Element],
    seqs: &[CPoint],
    k: u32,
) -> Result<RoundTripReport> {
    same_space(a.space.base.as_ref(), b.space.base.as_ref())?;
    let phi = Extension::new(a.space.clone(), b.embedding.clone())?;
    let psi = Extension::new(b.space.clone(), a.embedding.clone())?;
    let bound = Rational::pow2_neg(k) * Rational::from_integer(2);

    let mut report = RoundTripReport {
        checked: 0,
        precision: k,
        bound: bound.clone(),
        max_deviation_a: Rational::zero(),
        max_deviation_b: Rational::zero(),
        violations: 0,
    };

    for side in [a, b] {
        let mut points: Vec<CPoint> = xs.iter().map(|x| side.embedding.apply(x)).collect();
        for s in seqs {
            points.push(side.point_of(s)?);
        }
        let is_a = std::ptr::eq(side, a);
        for p in &points {
            let back = if is_a {
                psi.apply(&phi.apply(p)?)?
            } else {
                phi.apply(&psi.apply(p)?)?
            };
            let d = side.space.dist_approx(&back, p, k)?;
            report.checked += 1;
            if d > bound {
                report.violations += 1;
            }
            if is_a {
                report.max_deviation_a = report.max_deviation_a.clone().max(d);
            } else {
                report.max_deviation_b = report.max_deviation_b.clone().max(d);
            }
        }
    }
    Ok(report)
}
