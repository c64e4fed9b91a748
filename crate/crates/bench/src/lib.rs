//! Shared fixtures for the criterion benchmarks.

use malrel_core::{BinaryRelation, FiniteAlgebra, Operation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A seeded relation on `n` points where each pair is present with
/// probability `density`.
pub fn random_relation(n: usize, density: f64, seed: u64) -> BinaryRelation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rel = BinaryRelation::empty(n);
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(density) {
                rel.insert(a, b);
            }
        }
    }
    rel
}

/// A seeded algebra with one binary operation.
pub fn random_groupoid(n: usize, seed: u64) -> FiniteAlgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = (0..n * n).map(|_| rng.gen_range(0..n as u32)).collect();
    FiniteAlgebra::new(
        format!("groupoid{n}"),
        n,
        vec![Operation {
            name: "f".into(),
            arity: 2,
            table,
        }],
    )
    .expect("table is in range")
}
