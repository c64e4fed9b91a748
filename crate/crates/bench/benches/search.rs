use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use malrel_core::{
    corpus, find_term, free_algebra, Caps, ClauseChecker, ClauseId, ClauseSpec, RelationOperator,
    Route, VerifyConfig,
};

fn free(c: &mut Criterion) {
    let caps = Caps::default();
    let mut group = c.benchmark_group("free_algebra");
    for (name, k) in [("semilattice3", 3), ("z3", 2), ("lattice2", 3)] {
        let alg = corpus::bundled_algebra(name).unwrap();
        group.bench_function(format!("{name}/k={k}"), |b| {
            b.iter(|| free_algebra(black_box(&alg), k, &caps).unwrap())
        });
    }
    group.finish();
}

fn terms(c: &mut Criterion) {
    let caps = Caps::default();
    let mut group = c.benchmark_group("find_term");
    for (name, f, g) in [
        ("z3", "diag", "diag"),
        ("semilattice3", "cg", "tol"),
        ("lattice2", "diag", "diag"),
    ] {
        let alg = corpus::bundled_algebra(name).unwrap();
        let (f, g) = (
            RelationOperator::parse(f).unwrap(),
            RelationOperator::parse(g).unwrap(),
        );
        for route in [Route::Iv, Route::Vii] {
            group.bench_function(
                format!("{name}/{}/{}/{}", f.name, g.name, route.label()),
                |b| b.iter(|| find_term(black_box(&alg), &f, &g, route, &caps).unwrap()),
            );
        }
    }
    group.finish();
}

fn clauses(c: &mut Criterion) {
    let alg = corpus::bundled_algebra("semilattice3").unwrap();
    let op = RelationOperator::parse("cg").unwrap();
    let checker = ClauseChecker::new(&alg, &op, &op, &VerifyConfig::default()).unwrap();
    let mut group = c.benchmark_group("clause");
    group.sample_size(10);
    for id in [ClauseId::Iii, ClauseId::Vi, ClauseId::Xi] {
        let spec = ClauseSpec::new(id, None).unwrap();
        group.bench_function(format!("semilattice3/cg/{}", spec.label()), |b| {
            b.iter(|| checker.check(black_box(&spec)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, free, terms, clauses);
criterion_main!(benches);
