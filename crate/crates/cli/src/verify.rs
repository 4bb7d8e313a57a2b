use std::fmt::Write as _;
use std::sync::Arc;

use completion_core::metric::Status;
use completion_core::spaces::{build_generator, sample_points, GeneratorDescriptor};
use completion_core::{
    approximate_by_base, check_commutes, check_regularity, completion::DEFAULT_CHECK_DEPTH,
    dist_approx, embed, verify_metric_axioms, CPoint, Completion, Extension, MetricSpace, Rational,
    Space, SpaceDescriptor, SpaceRef,
};
use serde_json::{json, Map, Value};

use crate::{field, push_line, InputError, Options, Report};

/// Input: a bare space descriptor, or `{"space": <space>, "generators": [...]}`.
///
/// Finite tables are loaded without validation so that a broken table is
/// reported by the axiom suite (exit 1) rather than rejected as input.
pub(crate) fn run(opts: &Options, input: &Value) -> Result<Report, InputError> {
    let (space_json, gens) = if input.get("kind").is_some() {
        (input, Vec::new())
    } else {
        let gens: Vec<GeneratorDescriptor> = match input.get("generators") {
            Some(g) => serde_json::from_value(g.clone()).map_err(|e| InputError(format!("generators: {e}")))?,
            None => Vec::new(),
        };
        (field(input, "space")?, gens)
    };
    let desc = SpaceDescriptor::from_json(space_json)?;
    let space = Arc::new(Space::from_descriptor_unchecked(&desc)?);
    let base: SpaceRef = space.clone();
    let k = opts.precision;

    let mut points = sample_points(&space, opts.seed, opts.samples);
    for g in &gens {
        points.push(build_generator(&space, g)?);
    }

    let mut suites = Map::new();
    let mut text = String::new();
    let _ = writeln!(text, "space: {}", space.key());

    let axioms = verify_metric_axioms(space.as_ref(), opts.seed, opts.samples)?;
    let axioms_ok = axioms.all_pass();
    for (name, outcome) in &axioms.axioms {
        if outcome.status == Status::Skipped {
            let _ = writeln!(text, "{name}: SKIPPED");
            continue;
        }
        let mut detail = String::new();
        if let Some(w) = &outcome.witness {
            let items: Vec<String> = w.iter().map(|v| v.to_string()).collect();
            detail = format!("witness [{}]", items.join(", "));
            if let Some(d) = &outcome.detail {
                let _ = write!(detail, ": {d}");
            }
        }
        push_line(&mut text, name, outcome.passed(), &detail);
    }
    suites.insert("metric_axioms".into(), serde_json::to_value(&axioms)?);

    let rest = if axioms_ok {
        vec![
            regularity(&points),
            density(&base, &points, k)?,
            isometry(&base, opts, k)?,
            diagram(&base, opts, k)?,
        ]
    } else {
        ["regularity", "density", "isometry", "diagram"]
            .into_iter()
            .map(|n| Suite::skipped(n, "metric axioms failed"))
            .collect()
    };

    let mut passed = axioms_ok;
    for suite in rest {
        match suite.status {
            Status::Skipped => {
                let _ = writeln!(text, "{}: SKIPPED ({})", suite.name, suite.detail);
            }
            s => {
                push_line(&mut text, suite.name, s == Status::Pass, &suite.detail);
                passed &= s == Status::Pass;
            }
        }
        let mut body = suite.body;
        body.insert("status".into(), serde_json::to_value(suite.status)?);
        suites.insert(suite.name.into(), Value::Object(body));
    }
    let _ = writeln!(text, "overall: {}", crate::status_word(passed));

    let json = json!({
        "space": desc,
        "seed": opts.seed,
        "precision": k,
        "samples": opts.samples,
        "passed": passed,
        "suites": suites,
    });
    Ok(Report { passed, json, text })
}

struct Suite {
    name: &'static str,
    status: Status,
    detail: String,
    body: Map<String, Value>,
}

impl Suite {
    fn skipped(name: &'static str, why: &str) -> Self {
        let mut body = Map::new();
        body.insert("detail".into(), why.into());
        Suite { name, status: Status::Skipped, detail: why.into(), body }
    }

    fn from_parts(name: &'static str, ok: bool, detail: String, body: Value) -> Self {
        let Value::Object(body) = body else { unreachable!("suite bodies are objects") };
        Suite {
            name,
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
            body,
        }
    }
}

fn regularity(points: &[CPoint]) -> Suite {
    let failures: Vec<Value> = points
        .iter()
        .enumerate()
        .filter_map(|(i, y)| {
            check_regularity(y, DEFAULT_CHECK_DEPTH)
                .err()
                .map(|e| json!({"point": i, "error": e.to_string()}))
        })
        .collect();
    let detail = match failures.first() {
        Some(f) => format!("point {}: {}", f["point"], f["error"].as_str().unwrap_or_default()),
        None => format!("{} points to depth {DEFAULT_CHECK_DEPTH}", points.len()),
    };
    Suite::from_parts(
        "regularity",
        failures.is_empty(),
        detail,
        json!({"checked": points.len(), "depth": DEFAULT_CHECK_DEPTH, "failures": failures}),
    )
}

/// `approximate_by_base(y, j)` is within `2^-j` of `y` for every `j <= k`.
fn density(base: &SpaceRef, points: &[CPoint], k: u32) -> Result<Suite, InputError> {
    let mut violations = Vec::new();
    let mut checked = 0usize;
    for (i, y) in points.iter().enumerate() {
        for j in 0..=k {
            let x = approximate_by_base(y, j);
            let d = dist_approx(&embed(base, x.clone())?, y, j + 1)?;
            checked += 1;
            if d > Rational::pow2_neg(j) {
                violations.push(json!({"point": i, "precision": j, "witness": x, "observed": d}));
            }
        }
    }
    let detail = format!("{checked} checks, {} violations", violations.len());
    Ok(Suite::from_parts(
        "density",
        violations.is_empty(),
        detail,
        json!({"checked": checked, "violations": violations}),
    ))
}

fn isometry(base: &SpaceRef, opts: &Options, k: u32) -> Result<Suite, InputError> {
    let c = Completion::new(base.clone());
    let xs = base.sample(opts.seed, opts.samples);
    let report = c.embedding().check_isometry(&xs, k)?;
    let detail = format!(
        "{} pairs, max deviation {} <= {}",
        report.pairs_checked, report.max_deviation, report.allowed
    );
    Ok(Suite::from_parts("isometry", report.passed(), detail, serde_json::to_value(&report)?))
}

/// The extension of the canonical embedding along itself commutes.
fn diagram(base: &SpaceRef, opts: &Options, k: u32) -> Result<Suite, InputError> {
    let c = Completion::new(base.clone());
    let xs = base.sample(opts.seed.wrapping_add(1), opts.samples.max(1));
    let ext = Extension::new(c.clone(), c.embedding())?;
    let report = check_commutes(&c.embedding(), &ext.phi_z, &|y| ext.apply(y), &xs, k)?;
    let detail = format!(
        "{} samples, max {} <= {}",
        report.checked, report.max_observed, report.bound
    );
    Ok(Suite::from_parts("diagram", report.passed(), detail, serde_json::to_value(&report)?))
}
