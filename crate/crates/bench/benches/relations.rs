use std::collections::HashMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use malrel_bench::{random_groupoid, random_relation};
use malrel_core::{
    compatible_closure, congruence_closure, corpus, enumerate_admissible, eval_rel_expr,
    EvalContext, RelExpr,
};

fn calculus(c: &mut Criterion) {
    let mut group = c.benchmark_group("calculus");
    for n in [16, 64, 256] {
        let r = random_relation(n, 4.0 / n as f64, 1);
        let s = random_relation(n, 4.0 / n as f64, 2);
        group.bench_with_input(BenchmarkId::new("compose", n), &n, |b, _| {
            b.iter(|| black_box(&r).compose(black_box(&s)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("transitive_closure", n), &n, |b, _| {
            b.iter(|| black_box(&r).transitive_closure())
        });
        group.bench_with_input(BenchmarkId::new("rel_sum", n), &n, |b, _| {
            b.iter(|| black_box(&r).rel_sum(black_box(&s)).unwrap())
        });
    }
    group.finish();
}

fn closures(c: &mut Criterion) {
    let mut group = c.benchmark_group("closures");
    for n in [4, 8, 16] {
        let alg = random_groupoid(n, 3);
        let r = random_relation(n, 1.0 / n as f64, 4);
        group.bench_with_input(BenchmarkId::new("compatible", n), &n, |b, _| {
            b.iter(|| compatible_closure(&alg, black_box(&r)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("congruence", n), &n, |b, _| {
            b.iter(|| congruence_closure(&alg, black_box(&r)).unwrap())
        });
    }
    let sl3 = corpus::bundled_algebra("semilattice3").unwrap();
    group.bench_function("enumerate_admissible/semilattice3", |b| {
        b.iter(|| enumerate_admissible(black_box(&sl3), 4096).unwrap())
    });
    group.finish();
}

fn expressions(c: &mut Criterion) {
    let alg = corpus::bundled_algebra("semilattice3").unwrap();
    let env: HashMap<_, _> = [
        ("R".to_string(), random_relation(3, 0.5, 5)),
        ("S".to_string(), random_relation(3, 0.5, 6)),
    ]
    .into();
    let ops = HashMap::new();
    let ctx = EvalContext::new(&alg, &env, &ops);
    let expr = RelExpr::parse("cg(adm(R) o adm(S)) & (tol(R) + conv(adm(S)))").unwrap();
    c.bench_function("eval_rel_expr/semilattice3", |b| {
        b.iter(|| eval_rel_expr(black_box(&expr), &ctx).unwrap())
    });
}

criterion_group!(benches, calculus, closures, expressions);
criterion_main!(benches);
