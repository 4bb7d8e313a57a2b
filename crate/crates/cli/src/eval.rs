use completion_core::spaces::PointDescriptor;
use completion_core::{approximate_by_base, MetricSpace};
use serde_json::{json, Value};

use crate::{pow2_neg_json, InputError, Options, Report};

/// Input: `{"base": <space>, "generator": <generator>}`.
pub(crate) fn run(opts: &Options, input: &Value) -> Result<Report, InputError> {
    let desc: PointDescriptor = serde_json::from_value(input.clone())
        .map_err(|e| InputError(format!("point descriptor: {e}")))?;
    let (space, point) = desc.build()?;
    let k = opts.precision;
    let q = approximate_by_base(&point, k);
    let bound = pow2_neg_json(k);

    let metric = if space.is_ultrametric() { "ultrametric" } else { "metric" };
    let text = format!(
        "approximation: {q}\nguarantee: d(approximation, limit) <= 2^-{k} = {}\nspace: {} ({metric})\n",
        bound.as_str().unwrap(),
        space.key(),
    );
    let json = json!({
        "space": space.descriptor(),
        "generator": desc.generator,
        "precision": k,
        "approximation": q.to_json(),
        "bound": bound,
    });
    Ok(Report { passed: true, json, text })
}
