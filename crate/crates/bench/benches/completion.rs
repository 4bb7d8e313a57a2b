use std::sync::Arc;

use completion_core::category::{find_ption, FiniteCategory, ObjectId, PropertyPredicate};
use completion_core::spaces::{build_generator, sample_points, GeneratorDescriptor, Space};
use completion_core::{dist_approx, embed, ApproxMetric, CPoint, CompleteSpace, Completion, Element, SpaceRef};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn sqrt_distance(c: &mut Criterion) {
    let s = Arc::new(Space::RationalsAbs);
    let base: SpaceRef = s.clone();
    let y = build_generator(&s, &GeneratorDescriptor::Sqrt { radicand: "2".parse().unwrap() }).unwrap();
    let x = embed(&base, Element::Rational("3/2".parse().unwrap())).unwrap();
    let mut g = c.benchmark_group("dist_approx_sqrt2");
    for k in [16u32, 32, 64] {
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| dist_approx(black_box(&y), black_box(&x), k).unwrap())
        });
    }
    g.finish();
}

fn padic_distance(c: &mut Criterion) {
    let s = Arc::new(Space::padic(3).unwrap());
    let pts = sample_points(&s, 1, 2);
    c.bench_function("dist_approx_3adic_k32", |b| {
        b.iter(|| dist_approx(black_box(&pts[0]), black_box(&pts[1]), 32).unwrap())
    });
}

fn limit(c: &mut Criterion) {
    let s = Arc::new(Space::RationalsAbs);
    let base: SpaceRef = s.clone();
    let comp = Completion::new(base.clone());
    let y = sample_points(&s, 2, 1).pop().unwrap();
    let tails = Arc::new(move |i: u32| {
        let y = y.clone();
        CPoint::new(base.clone(), move |n| y.at(n.max(i)))
    });
    c.bench_function("limit_with_check_then_dist_k16", |b| {
        b.iter(|| {
            let z = comp.limit(tails.clone()).unwrap();
            comp.dist_approx(&z, &tails(4), 16).unwrap()
        })
    });
}

fn ption_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("find_ption_chain");
    for n in [8usize, 16, 32] {
        let labels: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let chain = FiniteCategory::chain(&refs).unwrap();
        let upper: Vec<String> = labels[n / 2..].to_vec();
        let s = PropertyPredicate::from_labels(upper);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| find_ption(&chain, &s, ObjectId(0)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sqrt_distance, padic_distance, limit, ption_search);
criterion_main!(benches);
