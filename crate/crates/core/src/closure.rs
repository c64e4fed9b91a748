//! Worklist subuniverse generation.
//!
//! Elements are processed in discovery order. When element `i` is processed,
//! every basic operation is applied to each tuple drawn from elements `0..=i`
//! that has at least one coordinate equal to `i`, so every tuple over the
//! final set is evaluated exactly once.

use std::collections::HashMap;
use std::hash::Hash;

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::term::Term;

/// How an element entered a closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    /// The `i`-th generator slot.
    Generator(usize),
    /// Basic operation `op` applied to earlier elements.
    Apply { op: usize, args: Vec<usize> },
}

/// Result of a closure run: elements in discovery order.
#[derive(Debug, Clone)]
pub struct Closure<E> {
    pub elements: Vec<E>,
    /// Position of each generator slot in `elements` (duplicates share one).
    pub generator_positions: Vec<usize>,
    /// First derivation found for each element, when requested.
    pub derivations: Option<Vec<Derivation>>,
}

impl<E> Closure<E> {
    /// Witness term for element `idx`; generator slot `i` becomes `Var(i)`.
    /// Panics if derivations were not recorded.
    pub fn term(&self, idx: usize, op_names: &[String]) -> Term {
        let derivations = self
            .derivations
            .as_ref()
            .expect("closure was computed without witnesses");
        let mut memo: Vec<Option<Term>> = vec![None; idx + 1];
        build_term(derivations, idx, op_names, &mut memo)
    }
}

pub(crate) fn build_term(
    derivations: &[Derivation],
    idx: usize,
    op_names: &[String],
    memo: &mut Vec<Option<Term>>,
) -> Term {
    if let Some(t) = &memo[idx] {
        return t.clone();
    }
    let t = match &derivations[idx] {
        Derivation::Generator(slot) => Term::Var(*slot),
        Derivation::Apply { op, args } => Term::App(
            op_names[*op].clone(),
            args.iter()
                .map(|&a| build_term(derivations, a, op_names, memo))
                .collect(),
        ),
    };
    memo[idx] = Some(t.clone());
    t
}

/// Membership index used by the engine.
pub(crate) trait ElementIndex<E> {
    fn find(&self, e: &E) -> Option<usize>;
    fn insert(&mut self, e: &E, idx: usize);
}

/// Index for elements that are small integers.
pub(crate) struct DenseIndex(Vec<u32>);

impl DenseIndex {
    pub(crate) fn new(universe: usize) -> Self {
        DenseIndex(vec![u32::MAX; universe])
    }
}

impl ElementIndex<usize> for DenseIndex {
    #[inline]
    fn find(&self, e: &usize) -> Option<usize> {
        match self.0[*e] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }
    #[inline]
    fn insert(&mut self, e: &usize, idx: usize) {
        self.0[*e] = idx as u32;
    }
}

/// Index for hashable elements such as tuples.
pub(crate) struct HashIndex<E>(HashMap<E, usize>);

impl<E> HashIndex<E> {
    pub(crate) fn new() -> Self {
        HashIndex(HashMap::new())
    }

    pub(crate) fn into_map(self) -> HashMap<E, usize> {
        self.0
    }
}

impl<E: Clone + Eq + Hash> ElementIndex<E> for HashIndex<E> {
    fn find(&self, e: &E) -> Option<usize> {
        self.0.get(e).copied()
    }
    fn insert(&mut self, e: &E, idx: usize) {
        self.0.insert(e.clone(), idx);
    }
}

/// The worklist engine. `apply(op, elements, arg_indices)` computes a basic
/// operation on elements already discovered. Fails once more than `cap`
/// elements have been found.
pub(crate) fn close<E, I, F>(
    arities: &[usize],
    mut apply: F,
    index: &mut I,
    generators: Vec<E>,
    want_witnesses: bool,
    cap: usize,
    what: &str,
) -> Result<Closure<E>>
where
    E: Clone,
    I: ElementIndex<E>,
    F: FnMut(usize, &[E], &[usize]) -> E,
{
    let mut elements: Vec<E> = Vec::new();
    let mut derivations: Vec<Derivation> = Vec::new();
    let mut generator_positions = Vec::with_capacity(generators.len());

    let push = |e: E,
                d: Derivation,
                elements: &mut Vec<E>,
                derivations: &mut Vec<Derivation>,
                index: &mut I|
     -> Result<usize> {
        if let Some(i) = index.find(&e) {
            return Ok(i);
        }
        let i = elements.len();
        if i >= cap {
            return Err(Error::cap(what, cap, i + 1));
        }
        index.insert(&e, i);
        elements.push(e);
        if want_witnesses {
            derivations.push(d);
        }
        Ok(i)
    };

    for (slot, g) in generators.into_iter().enumerate() {
        let pos = push(
            g,
            Derivation::Generator(slot),
            &mut elements,
            &mut derivations,
            index,
        )?;
        generator_positions.push(pos);
    }
    for (op, &m) in arities.iter().enumerate() {
        if m == 0 {
            let e = apply(op, &elements, &[]);
            push(
                e,
                Derivation::Apply { op, args: vec![] },
                &mut elements,
                &mut derivations,
                index,
            )?;
        }
    }

    let mut tuple = Vec::new();
    let mut i = 0;
    while i < elements.len() {
        for (op, &m) in arities.iter().enumerate() {
            if m == 0 {
                continue;
            }
            // `p` is the first coordinate holding `i`; earlier coordinates
            // range over 0..i, later ones over 0..=i.
            for p in 0..m {
                if p > 0 && i == 0 {
                    continue;
                }
                tuple.clear();
                tuple.resize(m, 0);
                tuple[p] = i;
                'tuples: loop {
                    let e = apply(op, &elements, &tuple);
                    if index.find(&e).is_none() {
                        push(
                            e,
                            Derivation::Apply {
                                op,
                                args: tuple.clone(),
                            },
                            &mut elements,
                            &mut derivations,
                            index,
                        )?;
                    }
                    let mut pos = m;
                    loop {
                        if pos == 0 {
                            break 'tuples;
                        }
                        pos -= 1;
                        if pos == p {
                            continue;
                        }
                        let limit = if pos < p { i } else { i + 1 };
                        tuple[pos] += 1;
                        if tuple[pos] < limit {
                            break;
                        }
                        tuple[pos] = 0;
                    }
                }
            }
        }
        i += 1;
    }

    Ok(Closure {
        elements,
        generator_positions,
        derivations: want_witnesses.then_some(derivations),
    })
}

/// A generated subuniverse of a finite algebra.
#[derive(Debug, Clone)]
pub struct Subalgebra {
    /// Elements in discovery order.
    pub elements: Vec<usize>,
    /// Witness per element, over variables naming the generators.
    pub witnesses: Option<Vec<Term>>,
}

impl Subalgebra {
    pub fn sorted_elements(&self) -> Vec<usize> {
        let mut out = self.elements.clone();
        out.sort_unstable();
        out
    }
}

/// Least subuniverse of `alg` containing `generators`.
pub fn generate_subalgebra(
    alg: &FiniteAlgebra,
    generators: &[usize],
    want_witnesses: bool,
) -> Result<Subalgebra> {
    if let Some(&bad) = generators.iter().find(|&&g| g >= alg.size()) {
        return Err(Error::ElementOutOfRange {
            element: bad,
            size: alg.size(),
        });
    }
    let mut buf = Vec::new();
    let closure = close(
        &alg.arities(),
        |op, elems: &[usize], args| {
            buf.clear();
            buf.extend(args.iter().map(|&a| elems[a]));
            alg.apply(op, &buf)
        },
        &mut DenseIndex::new(alg.size()),
        generators.to_vec(),
        want_witnesses,
        alg.size(),
        "subalgebra",
    )?;
    let witnesses = want_witnesses.then(|| {
        let names = alg.op_names();
        (0..closure.elements.len())
            .map(|i| closure.term(i, &names))
            .collect()
    });
    Ok(Subalgebra {
        elements: closure.elements,
        witnesses,
    })
}

/// All nonempty subuniverses of `alg`, sorted. Exhaustive over subsets of
/// the carrier, so only meant for small carriers.
pub fn subuniverses(alg: &FiniteAlgebra) -> Result<Vec<Vec<usize>>> {
    let n = alg.size();
    if n > 16 {
        return Err(Error::cap("subuniverse enumeration carrier", 16, n));
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let gens: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let sub = generate_subalgebra(alg, &gens, false)?.sorted_elements();
        if !out.contains(&sub) {
            out.push(sub);
        }
    }
    out.sort();
    Ok(out)
}
