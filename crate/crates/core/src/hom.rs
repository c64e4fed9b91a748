//! Homomorphisms between finite algebras of the same signature.

use std::sync::Arc;

use crate::admissible::{generated_admissible, AdmissibleRelation};
use crate::algebra::{checked_pow, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::relation::BinaryRelation;

/// A map commuting with every basic operation (checked on construction).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    source: Arc<FiniteAlgebra>,
    target: Arc<FiniteAlgebra>,
    map: Vec<usize>,
}

fn check_signatures(source: &FiniteAlgebra, target: &FiniteAlgebra) -> Result<()> {
    if !source.same_signature(target) {
        return Err(Error::SignatureMismatch {
            left: source.name().to_string(),
            right: target.name().to_string(),
        });
    }
    Ok(())
}

/// First tuple (operation name, arguments) on which `map` fails to commute.
fn commuting_violation(
    source: &FiniteAlgebra,
    target: &FiniteAlgebra,
    map: &[usize],
) -> Option<(String, Vec<usize>)> {
    let n = source.size();
    let mut args = Vec::new();
    let mut images = Vec::new();
    for (oi, op) in source.operations().iter().enumerate() {
        let len = checked_pow(n, op.arity).expect("table exists");
        for flat in 0..len {
            args.clear();
            args.extend(source.decode_tuple(flat, op.arity));
            images.clear();
            images.extend(args.iter().map(|&a| map[a]));
            if map[source.apply(oi, &args)] != target.apply(oi, &images) {
                return Some((op.name.clone(), args.clone()));
            }
        }
    }
    None
}

impl Homomorphism {
    pub fn new(
        source: Arc<FiniteAlgebra>,
        target: Arc<FiniteAlgebra>,
        map: Vec<usize>,
    ) -> Result<Self> {
        check_signatures(&source, &target)?;
        if map.len() != source.size() {
            return Err(Error::NotHomomorphism(format!(
                "map has {} entries for a carrier of size {}",
                map.len(),
                source.size()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= target.size()) {
            return Err(Error::ElementOutOfRange {
                element: bad,
                size: target.size(),
            });
        }
        if let Some((op, args)) = commuting_violation(&source, &target, &map) {
            return Err(Error::NotHomomorphism(format!(
                "fails to commute with `{op}` at {args:?}"
            )));
        }
        Ok(Homomorphism {
            source,
            target,
            map,
        })
    }

    pub fn identity(alg: Arc<FiniteAlgebra>) -> Self {
        let map = (0..alg.size()).collect();
        Homomorphism {
            source: alg.clone(),
            target: alg,
            map,
        }
    }

    pub fn source(&self) -> &Arc<FiniteAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteAlgebra> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    /// `next ∘ self`; revalidated through the constructor.
    pub fn then(&self, next: &Homomorphism) -> Result<Homomorphism> {
        if self.target.size() != next.source.size() {
            return Err(Error::CarrierMismatch {
                left: self.target.size(),
                right: next.source.size(),
            });
        }
        let map = self.map.iter().map(|&a| next.map[a]).collect();
        Homomorphism::new(self.source.clone(), next.target.clone(), map)
    }
}

/// Output of [`enumerate_homomorphisms`].
#[derive(Debug, Clone)]
pub struct HomEnumeration {
    /// Sorted lexicographically by the map vector.
    pub homs: Vec<Homomorphism>,
    pub complete: bool,
    /// Candidate values tried during the search.
    pub examined: usize,
}

struct HomSearch<'a> {
    source: &'a FiniteAlgebra,
    target: &'a FiniteAlgebra,
    map: Vec<Option<usize>>,
    found: Vec<Vec<usize>>,
    examined: usize,
    cap: usize,
    exhausted: bool,
}

impl HomSearch<'_> {
    /// Forces images of operation results whose arguments are all mapped.
    /// Returns false on a conflict; forced entries are pushed to `trail`.
    fn propagate(&mut self, trail: &mut Vec<usize>) -> bool {
        let n = self.source.size();
        let mut args = Vec::new();
        let mut images = Vec::new();
        loop {
            let mut changed = false;
            for (oi, op) in self.source.operations().iter().enumerate() {
                let len = checked_pow(n, op.arity).expect("table exists");
                'tuples: for flat in 0..len {
                    args.clear();
                    args.extend(self.source.decode_tuple(flat, op.arity));
                    images.clear();
                    for &a in &args {
                        match self.map[a] {
                            Some(v) => images.push(v),
                            None => continue 'tuples,
                        }
                    }
                    let result = self.source.apply(oi, &args);
                    let image = self.target.apply(oi, &images);
                    match self.map[result] {
                        Some(v) if v != image => return false,
                        Some(_) => {}
                        None => {
                            self.map[result] = Some(image);
                            trail.push(result);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn search(&mut self) {
        let Some(next) = self.map.iter().position(Option::is_none) else {
            self.found
                .push(self.map.iter().map(|v| v.unwrap()).collect());
            return;
        };
        for v in 0..self.target.size() {
            if self.examined >= self.cap {
                self.exhausted = true;
                return;
            }
            self.examined += 1;
            let mut trail = vec![next];
            self.map[next] = Some(v);
            if self.propagate(&mut trail) {
                self.search();
            }
            for e in trail {
                self.map[e] = None;
            }
            if self.exhausted {
                return;
            }
        }
    }
}

/// All homomorphisms `source → target`, by backtracking with forward
/// propagation. At most `cap` candidate values are tried; beyond that the
/// result is flagged incomplete.
pub fn enumerate_homomorphisms(
    source: &Arc<FiniteAlgebra>,
    target: &Arc<FiniteAlgebra>,
    cap: usize,
) -> Result<HomEnumeration> {
    check_signatures(source, target)?;
    let mut search = HomSearch {
        source,
        target,
        map: vec![None; source.size()],
        found: Vec::new(),
        examined: 0,
        cap,
        exhausted: false,
    };
    let mut trail = Vec::new();
    if search.propagate(&mut trail) {
        search.search();
    }
    let examined = search.examined;
    let complete = !search.exhausted;
    let mut maps = search.found;
    maps.sort();
    let homs = maps
        .into_iter()
        .map(|m| Homomorphism::new(source.clone(), target.clone(), m))
        .collect::<Result<Vec<_>>>()?;
    Ok(HomEnumeration {
        homs,
        complete,
        examined,
    })
}

/// `φ(R)`: the least reflexive compatible relation on the target containing
/// the image pairs of `rel`.
pub fn map_relation(h: &Homomorphism, rel: &BinaryRelation) -> Result<AdmissibleRelation> {
    if rel.carrier_size() != h.source.size() {
        return Err(Error::CarrierMismatch {
            left: h.source.size(),
            right: rel.carrier_size(),
        });
    }
    let pairs: Vec<(usize, usize)> = rel.pairs().map(|(a, b)| (h.map[a], h.map[b])).collect();
    generated_admissible(&h.target, &pairs)
}
