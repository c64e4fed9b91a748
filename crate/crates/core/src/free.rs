//! Free algebras in the variety generated by a finite algebra.
//!
//! The free algebra on `k` generators is realized as the subalgebra of
//! `A^(n^k)` generated by the `k` projection tuples. Coordinates are indexed
//! by assignments to the generators in row-major order (generator 0 is the
//! most significant digit), so coordinate `c` assigns
//! `decode_tuple(c, k)[j]` to generator `j`.

use std::collections::HashMap;

use crate::algebra::{checked_pow, Caps, FiniteAlgebra, Operation};
use crate::closure::{build_term, close, Derivation, HashIndex};
use crate::error::{Error, Result};
use crate::term::Term;

/// Element tuples are term operations, one coordinate per assignment.
#[derive(Debug, Clone)]
pub struct FreeAlgebraRepr {
    base: FiniteAlgebra,
    generator_count: usize,
    elements: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    derivations: Vec<Derivation>,
    generator_indices: Vec<usize>,
}

/// Builds the free algebra on `k` generators over `alg`.
pub fn free_algebra(alg: &FiniteAlgebra, k: usize, caps: &Caps) -> Result<FreeAlgebraRepr> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "generator count must be positive".into(),
        ));
    }
    let n = alg.size();
    let coords = checked_pow(n, k)
        .filter(|&c| c <= caps.max_power_carrier)
        .ok_or_else(|| {
            Error::cap(
                "free algebra coordinates",
                caps.max_power_carrier,
                checked_pow(n, k).unwrap_or(usize::MAX),
            )
        })?;
    let assignments: Vec<Vec<usize>> = (0..coords).map(|c| alg.decode_tuple(c, k)).collect();
    let projections: Vec<Vec<u32>> = (0..k)
        .map(|j| assignments.iter().map(|a| a[j] as u32).collect())
        .collect();

    let mut args = Vec::new();
    let mut index = HashIndex::new();
    let closure = close(
        &alg.arities(),
        |op, elems: &[Vec<u32>], tuple| {
            (0..coords)
                .map(|c| {
                    args.clear();
                    args.extend(tuple.iter().map(|&i| elems[i][c] as usize));
                    alg.apply(op, &args) as u32
                })
                .collect()
        },
        &mut index,
        projections,
        true,
        caps.max_free_elements,
        "free algebra elements",
    )?;
    let index = index.into_map();
    Ok(FreeAlgebraRepr {
        base: alg.clone(),
        generator_count: k,
        elements: closure.elements,
        index,
        derivations: closure.derivations.expect("witnesses requested"),
        generator_indices: closure.generator_positions,
    })
}

impl FreeAlgebraRepr {
    pub fn base(&self) -> &FiniteAlgebra {
        &self.base
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Vec<u32>] {
        &self.elements
    }

    /// Element positions of the generators (they coincide when `n = 1`).
    pub fn generator_indices(&self) -> &[usize] {
        &self.generator_indices
    }

    /// Number of coordinates, `n^k`.
    pub fn coordinate_count(&self) -> usize {
        self.elements.first().map_or(0, Vec::len)
    }

    /// The assignment indexing coordinate `c`.
    pub fn assignment(&self, c: usize) -> Vec<usize> {
        self.base.decode_tuple(c, self.generator_count)
    }

    pub fn index_of(&self, tuple: &[u32]) -> Option<usize> {
        self.index.get(tuple).copied()
    }

    /// A `k`-variable term whose term operation is element `i`.
    pub fn witness(&self, i: usize) -> Term {
        let names = self.base.op_names();
        let mut memo: Vec<Option<Term>> = vec![None; i + 1];
        build_term(&self.derivations, i, &names, &mut memo)
    }

    /// Evaluates a `k`-variable term coordinatewise, giving its element.
    pub fn element_of_term(&self, t: &Term) -> Result<usize> {
        let mut tuple = Vec::with_capacity(self.coordinate_count());
        for c in 0..self.coordinate_count() {
            tuple.push(t.eval(&self.base, &self.assignment(c))? as u32);
        }
        self.index_of(&tuple).ok_or_else(|| {
            Error::InvalidArgument(format!("term {t} does not denote a free-algebra element"))
        })
    }

    /// The free algebra as a [`FiniteAlgebra`] on `0..len`, same signature
    /// as the base. Table sizes are bounded by `caps.max_power_carrier`.
    pub fn to_algebra(&self, caps: &Caps) -> Result<FiniteAlgebra> {
        let size = self.len();
        let coords = self.coordinate_count();
        let mut ops = Vec::new();
        let mut args = Vec::new();
        let mut tuple = vec![0u32; coords];
        for (oi, op) in self.base.operations().iter().enumerate() {
            let len = checked_pow(size, op.arity)
                .filter(|&l| l <= caps.max_power_carrier)
                .ok_or_else(|| {
                    Error::cap(
                        format!("free algebra table of `{}`", op.name),
                        caps.max_power_carrier,
                        checked_pow(size, op.arity).unwrap_or(usize::MAX),
                    )
                })?;
            let mut table = Vec::with_capacity(len);
            let mut elems = vec![0usize; op.arity];
            for flat in 0..len {
                let mut rest = flat;
                for slot in (0..op.arity).rev() {
                    elems[slot] = rest % size;
                    rest /= size;
                }
                for (c, out) in tuple.iter_mut().enumerate() {
                    args.clear();
                    args.extend(elems.iter().map(|&e| self.elements[e][c] as usize));
                    *out = self.base.apply(oi, &args) as u32;
                }
                let image = self.index_of(&tuple).expect("free algebra is closed");
                table.push(image as u32);
            }
            ops.push(Operation {
                name: op.name.clone(),
                arity: op.arity,
                table,
            });
        }
        FiniteAlgebra::new(
            format!("F_{}({})", self.base.name(), self.generator_count),
            size,
            ops,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn binary(name: &str, size: usize, op: &str, table: Vec<u32>) -> FiniteAlgebra {
        FiniteAlgebra::new(
            name,
            size,
            vec![Operation {
                name: op.into(),
                arity: 2,
                table,
            }],
        )
        .unwrap()
    }

    /// Oracle: saturate a set of tuples under the coordinatewise operation.
    fn brute_force_size(alg: &FiniteAlgebra, k: usize) -> usize {
        let coords = alg.size().pow(k as u32);
        let mut set: HashSet<Vec<usize>> = (0..k)
            .map(|j| (0..coords).map(|c| alg.decode_tuple(c, k)[j]).collect())
            .collect();
        loop {
            let current: Vec<Vec<usize>> = set.iter().cloned().collect();
            let mut grew = false;
            for a in &current {
                for b in &current {
                    let c: Vec<usize> = (0..coords).map(|i| alg.apply(0, &[a[i], b[i]])).collect();
                    grew |= set.insert(c);
                }
            }
            if !grew {
                return set.len();
            }
        }
    }

    #[test]
    fn free_semilattice_and_z2_sizes() {
        let sl = binary("sl2", 2, "meet", vec![0, 0, 0, 1]);
        let z2 = binary("z2", 2, "add", vec![0, 1, 1, 0]);
        let caps = Caps::default();
        assert_eq!(free_algebra(&sl, 2, &caps).unwrap().len(), 3);
        assert_eq!(brute_force_size(&sl, 2), 3);
        assert_eq!(free_algebra(&sl, 3, &caps).unwrap().len(), 7);
        assert_eq!(brute_force_size(&sl, 3), 7);
        assert_eq!(free_algebra(&z2, 2, &caps).unwrap().len(), 4);
        assert_eq!(brute_force_size(&z2, 2), 4);
    }

    #[test]
    fn witnesses_reproduce_elements() {
        let z3 = binary("z3", 3, "add", vec![0, 1, 2, 1, 2, 0, 2, 0, 1]);
        let free = free_algebra(&z3, 2, &Caps::default()).unwrap();
        assert_eq!(free.len(), 9);
        for i in 0..free.len() {
            assert_eq!(free.element_of_term(&free.witness(i)).unwrap(), i);
        }
        assert_eq!(free.generator_indices(), &[0, 1]);
        assert_eq!(free.witness(0), Term::Var(0));
        assert_eq!(free.witness(1), Term::Var(1));
    }

    #[test]
    fn unary_identity_signature_gives_the_projection_orbit() {
        let alg = FiniteAlgebra::new(
            "idop",
            3,
            vec![Operation {
                name: "id".into(),
                arity: 1,
                table: vec![0, 1, 2],
            }],
        )
        .unwrap();
        assert_eq!(free_algebra(&alg, 1, &Caps::default()).unwrap().len(), 1);
    }

    #[test]
    fn materialized_algebra_matches_tuples() {
        let sl = binary("sl2", 2, "meet", vec![0, 0, 0, 1]);
        let free = free_algebra(&sl, 3, &Caps::default()).unwrap();
        let x = free.to_algebra(&Caps::default()).unwrap();
        assert_eq!(x.size(), 7);
        for a in 0..7 {
            assert_eq!(x.apply(0, &[a, a]), a);
            for b in 0..7 {
                assert_eq!(x.apply(0, &[a, b]), x.apply(0, &[b, a]));
            }
        }
    }

    #[test]
    fn element_cap_is_reported() {
        let z3 = binary("z3", 3, "add", vec![0, 1, 2, 1, 2, 0, 2, 0, 1]);
        let caps = Caps {
            max_free_elements: 5,
            ..Caps::default()
        };
        assert!(matches!(
            free_algebra(&z3, 2, &caps),
            Err(Error::CapExceeded {
                limit: 5,
                reached: 6,
                ..
            })
        ));
    }

    #[test]
    fn trivial_algebra_has_one_element() {
        let t = FiniteAlgebra::new("one", 1, vec![]).unwrap();
        let free = free_algebra(&t, 2, &Caps::default()).unwrap();
        assert_eq!(free.len(), 1);
        assert_eq!(free.generator_indices(), &[0, 0]);
    }
}
