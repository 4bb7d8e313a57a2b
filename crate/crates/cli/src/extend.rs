use std::fmt::Write as _;
use std::sync::Arc;

use completion_core::spaces::sample_points;
use completion_core::{
    check_commutes, dist_approx, ApproxMetric, CPoint, Completion, Element, Extension,
    IsometryMap, MetricSpace, Rational, Space, SpaceDescriptor, SpaceRef,
};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::{field, push_line, InputError, Options, Report};

/// The fixed catalogue of maps `X -> Completion(X)`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MapSpec {
    /// The canonical embedding.
    Embedding,
    /// `x -> x + by`, an isometry of the rationals in every supported metric.
    Shift { by: Rational },
    /// `x -> by * x`; not an isometry unless `by` is a unit, so the precheck
    /// rejects it.
    Scale { by: Rational },
}

/// Input: `{"source": <space>, "target": <space>?, "isometry": <map>, "samples": [..]?}`.
///
/// The target completion must be over the same space as the source.
pub(crate) fn run(opts: &Options, input: &Value) -> Result<Report, InputError> {
    let source_desc = SpaceDescriptor::from_json(field(input, "source")?)?;
    let space = Arc::new(Space::from_descriptor(&source_desc)?);
    let source: SpaceRef = space.clone();
    if let Some(t) = input.get("target") {
        let target = Space::from_descriptor(&SpaceDescriptor::from_json(t)?)?;
        if target.key() != source.key() {
            return Err(InputError(format!(
                "mismatched spaces: source {} but target completes {}",
                source.key(),
                target.key()
            )));
        }
    }
    let spec: MapSpec = serde_json::from_value(field(input, "isometry")?.clone())
        .map_err(|e| InputError(format!("isometry: {e}")))?;
    let xs: Vec<Element> = match input.get("samples") {
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| source.parse_element(v))
            .collect::<Result<_, _>>()?,
        Some(other) => return Err(InputError(format!("samples must be an array, got {other}"))),
        None => source.sample(opts.seed, opts.samples),
    };
    if xs.is_empty() {
        return Err(InputError("no sample points".into()));
    }
    let k = opts.precision;
    let z = Completion::new(source.clone());
    let phi_z = build_map(&space, &z, &spec)?;

    let mut text = String::new();
    let _ = writeln!(text, "source: {}", source.key());
    let _ = writeln!(text, "map: {}", describe(&spec));

    let pre = phi_z.check_isometry(&xs, k)?;
    let pre_detail = match pre.violations.first() {
        Some(v) => format!(
            "d({}, {}) = {} but image distance {}",
            v.x, v.y, v.source_distance, v.target_distance
        ),
        None => format!("{} pairs", pre.pairs_checked),
    };
    push_line(&mut text, "isometry precheck", pre.passed(), &pre_detail);
    if !pre.passed() {
        let json = json!({
            "source": source_desc,
            "precision": k,
            "passed": false,
            "isometry_precheck": pre,
        });
        return Ok(Report { passed: false, json, text });
    }

    let c = z;
    let ext = Extension::new(c.clone(), phi_z)?;
    let commute = check_commutes(&c.embedding(), &ext.phi_z, &|y| ext.apply(y), &xs, k)?;
    push_line(
        &mut text,
        "diagram",
        commute.passed(),
        &format!(
            "{} samples, max deviation {} <= 2^-{k} = {}",
            commute.checked, commute.max_observed, commute.bound
        ),
    );

    let ext_iso = extension_isometry(&space, &c, &ext, opts, k)?;
    push_line(
        &mut text,
        "extension isometry",
        ext_iso["violations"] == json!(0),
        &format!(
            "{} pairs, max deviation {} <= {}",
            ext_iso["pairs_checked"],
            ext_iso["max_deviation"].as_str().unwrap_or_default(),
            ext_iso["bound"].as_str().unwrap_or_default()
        ),
    );

    let passed = commute.passed() && ext_iso["violations"] == json!(0);
    let _ = writeln!(text, "overall: {}", crate::status_word(passed));
    let json = json!({
        "source": source_desc,
        "precision": k,
        "passed": passed,
        "isometry_precheck": pre,
        "diagram": commute,
        "extension_isometry": ext_iso,
    });
    Ok(Report { passed, json, text })
}

fn describe(spec: &MapSpec) -> String {
    match spec {
        MapSpec::Embedding => "embedding".into(),
        MapSpec::Shift { by } => format!("shift by {by}"),
        MapSpec::Scale { by } => format!("scale by {by}"),
    }
}

fn build_map(space: &Arc<Space>, z: &Completion, spec: &MapSpec) -> Result<IsometryMap<Completion>, InputError> {
    let source: SpaceRef = space.clone();
    let affine = |f: Box<dyn Fn(&Rational) -> Rational + Send + Sync>| {
        let base = source.clone();
        IsometryMap::new(source.clone(), z.clone(), move |x: &Element| {
            let q = x.as_rational().expect("checked rational space");
            CPoint::constant(base.clone(), Element::Rational(f(q)))
        })
    };
    let rational_only = || {
        if !matches!(space.as_ref(), Space::RationalsAbs | Space::RationalsPadic(_)) {
            Err(InputError(format!("shift and scale need a space of rationals, got {}", source.key())))
        } else {
            Ok(())
        }
    };
    Ok(match spec.clone() {
        MapSpec::Embedding => z.embedding(),
        MapSpec::Shift { by } => {
            rational_only()?;
            affine(Box::new(move |q| q + &by))
        }
        MapSpec::Scale { by } => {
            rational_only()?;
            affine(Box::new(move |q| q * &by))
        }
    })
}

/// Distances between sampled completion points are preserved by the
/// extension to within `2 * 2^-k`.
fn extension_isometry(
    space: &Arc<Space>,
    c: &Completion,
    ext: &Extension<Completion>,
    opts: &Options,
    k: u32,
) -> Result<Value, InputError> {
    let points = sample_points(space, opts.seed, opts.samples.min(12));
    let images: Vec<CPoint> = points.iter().map(|y| ext.apply(y)).collect::<Result<_, _>>()?;
    let bound = Rational::from_integer(2) * Rational::pow2_neg(k);
    let mut max = Rational::zero();
    let mut pairs = 0usize;
    let mut violations = 0usize;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d_src = dist_approx(&points[i], &points[j], k + 1)?;
            let d_tgt = c.dist_approx(&images[i], &images[j], k + 1)?;
            let dev = (&d_tgt - &d_src).abs();
            pairs += 1;
            if dev > bound {
                violations += 1;
            }
            max = max.max(dev);
        }
    }
    Ok(json!({
        "pairs_checked": pairs,
        "violations": violations,
        "max_deviation": max,
        "bound": bound,
    }))
}
