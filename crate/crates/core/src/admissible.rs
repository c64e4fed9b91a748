//! Compatible relations and the closures built from them.

use std::collections::{HashSet, VecDeque};
use std::ops::Deref;

use serde::Serialize;

use crate::algebra::FiniteAlgebra;
use crate::closure::{close, Closure, DenseIndex};
use crate::error::{Error, Result};
use crate::relation::BinaryRelation;

/// A reflexive relation closed under every basic operation, i.e. a
/// subuniverse of `A²` containing the diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct AdmissibleRelation(BinaryRelation);

impl AdmissibleRelation {
    /// Checks reflexivity and compatibility against `alg`.
    pub fn new(alg: &FiniteAlgebra, rel: BinaryRelation) -> Result<Self> {
        check_carrier(alg, &rel)?;
        if !rel.is_reflexive() {
            return Err(Error::NotReflexive);
        }
        if let Some(op) = incompatible_operation(alg, &rel) {
            return Err(Error::NotCompatible(op));
        }
        Ok(AdmissibleRelation(rel))
    }

    pub(crate) fn new_unchecked(rel: BinaryRelation) -> Self {
        AdmissibleRelation(rel)
    }

    pub fn diagonal(alg: &FiniteAlgebra) -> Self {
        AdmissibleRelation(BinaryRelation::diagonal(alg.size()))
    }

    pub fn full(alg: &FiniteAlgebra) -> Self {
        AdmissibleRelation(BinaryRelation::full(alg.size()))
    }

    pub fn relation(&self) -> &BinaryRelation {
        &self.0
    }

    pub fn into_relation(self) -> BinaryRelation {
        self.0
    }

    /// The converse of a reflexive subuniverse of `A²` is one again.
    pub fn converse(&self) -> Self {
        AdmissibleRelation(self.0.converse())
    }
}

impl Deref for AdmissibleRelation {
    type Target = BinaryRelation;
    fn deref(&self) -> &BinaryRelation {
        &self.0
    }
}

impl std::fmt::Display for AdmissibleRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl From<AdmissibleRelation> for BinaryRelation {
    fn from(r: AdmissibleRelation) -> Self {
        r.0
    }
}

fn check_carrier(alg: &FiniteAlgebra, rel: &BinaryRelation) -> Result<()> {
    if rel.carrier_size() != alg.size() {
        return Err(Error::CarrierMismatch {
            left: alg.size(),
            right: rel.carrier_size(),
        });
    }
    Ok(())
}

/// Name of the first operation `rel` is not closed under.
pub(crate) fn incompatible_operation(alg: &FiniteAlgebra, rel: &BinaryRelation) -> Option<String> {
    let pairs: Vec<(usize, usize)> = rel.pairs().collect();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (oi, op) in alg.operations().iter().enumerate() {
        let m = op.arity;
        if m == 0 {
            let c = alg.apply(oi, &[]);
            if !rel.contains(c, c) {
                return Some(op.name.clone());
            }
            continue;
        }
        if pairs.is_empty() {
            continue;
        }
        let mut idx = vec![0usize; m];
        'tuples: loop {
            left.clear();
            right.clear();
            for &i in &idx {
                left.push(pairs[i].0);
                right.push(pairs[i].1);
            }
            if !rel.contains(alg.apply(oi, &left), alg.apply(oi, &right)) {
                return Some(op.name.clone());
            }
            let mut pos = m;
            loop {
                if pos == 0 {
                    break 'tuples;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < pairs.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
    None
}

/// True when `rel` is closed under every basic operation (no reflexivity required).
pub fn is_compatible(alg: &FiniteAlgebra, rel: &BinaryRelation) -> bool {
    rel.carrier_size() == alg.size() && incompatible_operation(alg, rel).is_none()
}

/// True when `rel` is reflexive and compatible.
pub fn is_admissible(alg: &FiniteAlgebra, rel: &BinaryRelation) -> bool {
    rel.is_reflexive() && is_compatible(alg, rel)
}

/// Subuniverse of `A²` generated by `pairs`, encoded as `a * n + b`, with
/// optional derivations. Generator slot `i` is `pairs[i]`.
pub fn pair_closure(
    alg: &FiniteAlgebra,
    pairs: &[(usize, usize)],
    want_witnesses: bool,
) -> Result<Closure<usize>> {
    let n = alg.size();
    if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| a >= n || b >= n) {
        return Err(Error::ElementOutOfRange {
            element: a.max(b),
            size: n,
        });
    }
    let universe = n * n;
    let mut left = Vec::new();
    let mut right = Vec::new();
    close(
        &alg.arities(),
        |op, elems: &[usize], args| {
            left.clear();
            right.clear();
            for &i in args {
                left.push(elems[i] / n);
                right.push(elems[i] % n);
            }
            alg.apply(op, &left) * n + alg.apply(op, &right)
        },
        &mut DenseIndex::new(universe),
        pairs.iter().map(|&(a, b)| a * n + b).collect(),
        want_witnesses,
        universe,
        "pair closure",
    )
}

fn closure_to_relation(n: usize, closure: &Closure<usize>) -> BinaryRelation {
    let mut out = BinaryRelation::empty(n);
    for &code in &closure.elements {
        out.insert(code / n, code % n);
    }
    out
}

/// Least compatible relation containing `rel`; the diagonal is not added.
pub fn compatible_closure(alg: &FiniteAlgebra, rel: &BinaryRelation) -> Result<BinaryRelation> {
    check_carrier(alg, rel)?;
    let pairs: Vec<(usize, usize)> = rel.pairs().collect();
    let closure = pair_closure(alg, &pairs, false)?;
    Ok(closure_to_relation(alg.size(), &closure))
}

/// Least reflexive compatible relation containing `pairs`.
pub fn generated_admissible(
    alg: &FiniteAlgebra,
    pairs: &[(usize, usize)],
) -> Result<AdmissibleRelation> {
    let n = alg.size();
    let mut gens: Vec<(usize, usize)> = pairs.to_vec();
    gens.extend((0..n).map(|a| (a, a)));
    let closure = pair_closure(alg, &gens, false)?;
    Ok(AdmissibleRelation(closure_to_relation(n, &closure)))
}

/// [`generated_admissible`] for the pairs of a relation.
pub fn admissible_closure(alg: &FiniteAlgebra, rel: &BinaryRelation) -> Result<AdmissibleRelation> {
    check_carrier(alg, rel)?;
    let pairs: Vec<(usize, usize)> = rel.pairs().collect();
    generated_admissible(alg, &pairs)
}

/// Least tolerance containing `rel`.
pub fn tolerance_closure(alg: &FiniteAlgebra, rel: &BinaryRelation) -> Result<AdmissibleRelation> {
    check_carrier(alg, rel)?;
    let mut pairs: Vec<(usize, usize)> = rel.pairs().collect();
    pairs.extend(rel.pairs().map(|(a, b)| (b, a)));
    generated_admissible(alg, &pairs)
}

/// Least congruence containing `rel`: alternate tolerance and transitive
/// closure until stable.
pub fn congruence_closure(alg: &FiniteAlgebra, rel: &BinaryRelation) -> Result<AdmissibleRelation> {
    let mut current = tolerance_closure(alg, rel)?.into_relation();
    loop {
        let transitive = current.transitive_closure();
        if transitive == current {
            return Ok(AdmissibleRelation(current));
        }
        current = tolerance_closure(alg, &transitive)?.into_relation();
    }
}

/// Output of [`enumerate_admissible`].
#[derive(Debug, Clone)]
pub struct AdmissibleSet {
    /// Sorted by [`BinaryRelation`]'s lexicographic order.
    pub relations: Vec<AdmissibleRelation>,
    /// False when the cap stopped the enumeration.
    pub complete: bool,
}

/// All reflexive compatible relations of `alg`, up to `cap` of them.
///
/// Every such relation is reached from Δ by repeatedly closing
/// `C ∪ {p}` for a pair `p ∉ C`, so a search over closed sets suffices.
pub fn enumerate_admissible(alg: &FiniteAlgebra, cap: usize) -> Result<AdmissibleSet> {
    let n = alg.size();
    let diag = generated_admissible(alg, &[])?.into_relation();
    let mut seen: HashSet<BinaryRelation> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut complete = true;
    seen.insert(diag.clone());
    queue.push_back(diag);
    'outer: while let Some(current) = queue.pop_front() {
        let base: Vec<(usize, usize)> = current.pairs().collect();
        for a in 0..n {
            for b in 0..n {
                if current.contains(a, b) {
                    continue;
                }
                let mut gens = base.clone();
                gens.push((a, b));
                let closure = pair_closure(alg, &gens, false)?;
                let next = closure_to_relation(n, &closure);
                if !seen.contains(&next) {
                    if seen.len() >= cap {
                        complete = false;
                        break 'outer;
                    }
                    seen.insert(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }
    let mut relations: Vec<AdmissibleRelation> = seen.into_iter().map(AdmissibleRelation).collect();
    relations.sort();
    Ok(AdmissibleSet {
        relations,
        complete,
    })
}
