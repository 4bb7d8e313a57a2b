use std::fmt::Write as _;

use completion_core::category::{
    check_rigidity, find_ption, verify_category_axioms, CategoryDescriptor, FiniteCategory,
    PropertyPredicate,
};
use serde_json::{json, Value};

use crate::{field, push_line, InputError, Options, Report};

/// Input: `{"category": <descriptor>, "property": [labels] | "all", "object": label}`.
///
/// `property` defaults to every object. The P-tion search runs only when
/// `object` is given.
pub(crate) fn run(_opts: &Options, input: &Value) -> Result<Report, InputError> {
    let desc: CategoryDescriptor = serde_json::from_value(field(input, "category")?.clone())
        .map_err(|e| InputError(format!("category descriptor: {e}")))?;
    let cat = FiniteCategory::from_descriptor(&desc)?;

    let (s, s_json) = match input.get("property") {
        None => (PropertyPredicate::all(), json!("all")),
        Some(Value::String(a)) if a == "all" => (PropertyPredicate::all(), json!("all")),
        Some(Value::Array(items)) => {
            let mut labels = Vec::new();
            for v in items {
                let l = v
                    .as_str()
                    .ok_or_else(|| InputError(format!("property members are labels, got {v}")))?;
                if cat.object_by_label(l).is_none() {
                    return Err(InputError(format!("unknown object {l:?} in property")));
                }
                labels.push(l.to_string());
            }
            (PropertyPredicate::from_labels(labels.clone()), json!(labels))
        }
        Some(other) => return Err(InputError(format!("property must be \"all\" or a list, got {other}"))),
    };
    let x = match input.get("object") {
        None => None,
        Some(v) => {
            let l = v.as_str().ok_or_else(|| InputError(format!("object must be a label, got {v}")))?;
            Some(cat.object_by_label(l).ok_or_else(|| InputError(format!("unknown object {l:?}")))?)
        }
    };

    let mut text = String::new();
    let _ = writeln!(
        text,
        "category: {} objects, {} morphisms",
        cat.len_objects(),
        cat.len_morphisms()
    );
    let axioms = verify_category_axioms(&cat);
    for (name, outcome) in &axioms.axioms {
        let detail = outcome
            .witness
            .as_ref()
            .map(|w| {
                let items: Vec<String> = w.iter().map(|v| v.to_string()).collect();
                format!("witness [{}]", items.join(", "))
            })
            .unwrap_or_default();
        push_line(&mut text, name, outcome.passed(), &detail);
    }
    let mut passed = axioms.all_pass();

    let mut out = json!({
        "objects": cat.len_objects(),
        "morphisms": cat.len_morphisms(),
        "property": s_json,
        "axioms": axioms,
    });

    // rigidity and the search only make sense on a lawful category
    if passed {
        let rigidity = check_rigidity(&cat, &s);
        let detail = match rigidity.violations.first() {
            Some(v) => format!("{} has the non-identity mono endomorphism {}", v.object, v.morphism),
            None => format!("{} objects in S", rigidity.objects_checked),
        };
        push_line(&mut text, "rigidity", rigidity.passed(), &detail);
        passed &= rigidity.passed();
        out["rigidity"] = serde_json::to_value(&rigidity)?;

        if let (Some(x), true) = (x, rigidity.passed()) {
            let candidates = find_ption(&cat, &s, x)?;
            let label = cat.object_label(x);
            if candidates.is_empty() {
                let _ = writeln!(text, "no P-tion of {label} in S");
            }
            for c in &candidates {
                let _ = writeln!(text, "P-tion of {label}: {} via {}", c.object, c.morphism);
            }
            out["object"] = json!(label);
            out["candidates"] = serde_json::to_value(&candidates)?;
        }
    }
    let _ = writeln!(text, "overall: {}", crate::status_word(passed));
    out["passed"] = json!(passed);
    Ok(Report { passed, json: out, text })
}
