use completion_core::category::{
    check_rigidity, closing_monos, find_ption, is_mono, verify_category_axioms, CategoryDescriptor,
    FiniteCategory, ObjectId, PropertyPredicate, ASSOCIATIVITY,
};
use completion_core::metric::Status;
use completion_core::spaces::FiniteSpaceTable;
use completion_core::Rational;
use proptest::prelude::*;

fn table(labels: &[&str], d: &[i64]) -> FiniteSpaceTable {
    FiniteSpaceTable::new(
        labels.iter().map(|s| s.to_string()).collect(),
        d.iter().map(|&x| Rational::from_integer(x)).collect(),
    )
    .unwrap()
}

/// Least member of `s` above `x` in a total order given by position.
fn least_above(order: &[&str], s: &[&str], x: &str) -> Option<String> {
    let pos = |l: &str| order.iter().position(|o| *o == l).unwrap();
    s.iter()
        .filter(|m| pos(m) >= pos(x))
        .min_by_key(|m| pos(m))
        .map(|m| m.to_string())
}

#[test]
fn chain_ption_matches_order_brute_force() {
    let order = ["a", "b", "c", "d"];
    let chain = FiniteCategory::chain(&order).unwrap();
    let s = ["c", "d"];
    let found = find_ption(&chain, &PropertyPredicate::from_labels(s), ObjectId(0)).unwrap();
    assert_eq!(found.len(), 1);
    assert_eq!(Some(found[0].object.clone()), least_above(&order, &s, "a"));
    assert_eq!(found[0].morphism, "a->c");
}

#[test]
fn descriptor_json_shape() {
    let json = serde_json::json!({
        "objects": ["A", "B"],
        "morphisms": [
            {"name": "1A", "src": "A", "dst": "A"},
            {"name": "1B", "src": "B", "dst": "B"},
            {"name": "f", "src": "A", "dst": "B"}
        ],
        "composition": [],
        "identities": {"A": "1A", "B": "1B"}
    });
    let desc: CategoryDescriptor = serde_json::from_value(json).unwrap();
    let cat = FiniteCategory::from_descriptor(&desc).unwrap();
    assert!(verify_category_axioms(&cat).all_pass());
    let found = find_ption(&cat, &PropertyPredicate::from_labels(["B"]), ObjectId(0)).unwrap();
    assert_eq!(found[0].morphism, "f");
}

#[test]
fn corrupted_table_fails_associativity() {
    let z3 = FiniteCategory::cyclic_group(3).unwrap();
    let g0 = z3.morphism_by_name("g0").unwrap();
    let g1 = z3.morphism_by_name("g1").unwrap();
    let report = verify_category_axioms(&z3.with_entry(g1, g1, g0));
    assert_eq!(report.get(ASSOCIATIVITY).unwrap().status, Status::Fail);
}

#[test]
fn z2_is_not_rigid() {
    let z2 = FiniteCategory::cyclic_group(2).unwrap();
    assert!(!check_rigidity(&z2, &PropertyPredicate::all()).passed());
    assert!(z2.morphism_ids().all(|f| is_mono(&z2, f)));
}

#[test]
fn metric_space_category_passes_axioms() {
    let cat = FiniteCategory::of_finite_metric_spaces(&[
        ("pt", table(&["p"], &[0])),
        ("seg", table(&["x", "y"], &[0, 1, 1, 0])),
        ("path", table(&["a", "b", "c"], &[0, 1, 2, 1, 0, 1, 2, 1, 0])),
        ("tri", table(&["u", "v", "w"], &[0, 1, 1, 1, 0, 1, 1, 1, 0])),
    ])
    .unwrap();
    assert!(verify_category_axioms(&cat).all_pass());
    assert!(cat.morphism_ids().all(|f| is_mono(&cat, f)));
    // seg has the swap, so it is not rigid; path also has its reflection
    let rigid = check_rigidity(&cat, &PropertyPredicate::from_labels(["pt"]));
    assert!(rigid.passed());
    assert!(!check_rigidity(&cat, &PropertyPredicate::from_labels(["seg"])).passed());
}

/// Every pair of returned candidates must be mutually comparable through closing monos.
fn check_mutual_comparability(cat: &FiniteCategory, s: &PropertyPredicate, x: ObjectId) {
    let found = find_ption(cat, s, x).unwrap();
    for a in &found {
        for b in &found {
            assert!(!closing_monos(cat, a.morphism_id, b.morphism_id).is_empty());
            assert!(!closing_monos(cat, b.morphism_id, a.morphism_id).is_empty());
        }
    }
}

#[test]
fn ption_candidates_in_a_preorder_are_comparable() {
    // a preorder with two equivalent tops: c ~ d above a, b
    let labels = ["a", "b", "c", "d"];
    let leq = |i: usize, j: usize| i == j || j >= 2 || (i == 0 && j == 1);
    let cat = FiniteCategory::preorder(&labels, leq).unwrap();
    assert!(verify_category_axioms(&cat).all_pass());
    let s = PropertyPredicate::from_labels(["c", "d"]);
    let found = find_ption(&cat, &s, ObjectId(0)).unwrap();
    assert_eq!(found.len(), 2);
    check_mutual_comparability(&cat, &s, ObjectId(0));
}

proptest! {
    #[test]
    fn chain_ption_is_least_member_above(mask in 0u8..64, x in 0usize..6) {
        let order = ["a", "b", "c", "d", "e", "f"];
        let chain = FiniteCategory::chain(&order).unwrap();
        let members: Vec<&str> = order.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, l)| *l).collect();
        let s = PropertyPredicate::from_labels(members.iter().copied());
        let found = find_ption(&chain, &s, ObjectId(x)).unwrap();
        let expected = least_above(&order, &members, order[x]);
        prop_assert_eq!(found.iter().map(|c| c.object.clone()).collect::<Vec<_>>(), expected.into_iter().collect::<Vec<_>>());
        check_mutual_comparability(&chain, &s, ObjectId(x));
    }
}
