//! Constructive completion of metric spaces.
//!
//! * [`rational`] and [`metric`]: exact rational arithmetic, presented metric
//!   spaces, axiom checks and isometries.
//! * [`spaces`]: rationals with the absolute and p-adic metrics, finite
//!   tables, binary products, and built-in regular sequences.
//! * [`completion`]: points of the completion as regular Cauchy sequences,
//!   the completion metric, limits, density witnesses and the universal
//!   extension of isometries into complete spaces.
//! * [`category`]: finite categories, monomorphisms, rigidity and the search
//!   for universal objects reached by a mono.

pub mod category;
pub mod completion;
pub mod error;
pub mod metric;
pub mod rational;
pub mod spaces;

pub use completion::{
    apart, approximate_by_base, check_commutes, check_regularity, completion_iso_roundtrip,
    dist_approx, embed, extend_isometry, CPoint, CompleteSpace, Completion, EmbeddedCompletion,
    Extension, PointSeq,
};
pub use error::{Error, Result};
pub use metric::{
    verify_metric_axioms, ApproxMetric, AxiomReport, BaseSpace, Element, IsometryMap, MetricSpace,
    SpaceRef,
};
pub use rational::Rational;
pub use spaces::{Space, SpaceDescriptor};
