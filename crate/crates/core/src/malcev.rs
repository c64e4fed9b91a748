//! Search for ternary terms that are Mal'cev modulo a pair of operators.
//!
//! A term `t` is Mal'cev modulo `F, G` when `a F(R) t(a,b,b)` and
//! `t(a,a,b) G(R) b` for every admissible `R` and every `aRb`. The search
//! decides this on the free algebra `X` of the generated variety, using one
//! of three equivalent membership conditions, and extracts a witness term.
//!
//! Conventions:
//!
//! * On `X = F(x, y)` the relation `S` is generated by the slots
//!   `((x,y), (x,x), (y,y))`. A pair `(q, p) ∈ S` with witness `u` has
//!   `q = u(x,x,y)` and `p = u(y,x,y)`, so `t(z1,z2,z3) := u(z2,z1,z3)`
//!   satisfies `t(x,y,y) = p` and `t(x,x,y) = q`.
//! * On `X = F(x, y, z)` the relation `S` is generated by the slots
//!   `((x,y), (y,z), (x,x), (y,y), (z,z))`. A pair `(b, c) ∈ S` with witness
//!   `u` has `b = t1 = u(x,y,x,y,z)` and `c = t2 = u(y,z,x,y,z)`. With
//!   `t'(v1..v5) := u(v4,v5,v1,v2,v3)` the extracted term is
//!   `t(x,y,z) = t'(x,y,z,x,z) = u(x,z,x,y,z)`.

use std::collections::HashMap;

use serde::{Serialize, Serializer};

use crate::admissible::{
    enumerate_admissible, generated_admissible, pair_closure, AdmissibleRelation,
};
use crate::algebra::{Caps, FiniteAlgebra};
use crate::closure::{subuniverses, Closure};
use crate::error::{Error, Result};
use crate::free::{free_algebra, FreeAlgebraRepr};
use crate::operator::{apply_operator, RelationOperator};
use crate::relation::BinaryRelation;
use crate::term::Term;

/// Which free-algebra condition produced a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// `x F(S) t(x,y,y)` and `t(x,x,y) G(S) y` on two generators.
    Iv,
    /// `S ∘ S ⊆ F(S) ∘ S ∘ G(S)` on three generators.
    Vii,
    /// `S ⊆ F(S) ∘ S⁻ ∘ G(S)` on two generators.
    X,
}

impl Route {
    pub fn label(self) -> &'static str {
        match self {
            Route::Iv => "iv",
            Route::Vii => "vii",
            Route::X => "x",
        }
    }

    pub fn parse(text: &str) -> Option<Route> {
        match text {
            "iv" => Some(Route::Iv),
            "vii" => Some(Route::Vii),
            "x" => Some(Route::X),
            _ => None,
        }
    }
}

/// Whether a condition is tested on its distinguished pair only or as a
/// full inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InclusionMode {
    #[default]
    SinglePair,
    Full,
}

fn xyz<S2: Serializer>(t: &Term, s: S2) -> std::result::Result<S2::Ok, S2::Error> {
    s.serialize_str(&t.to_prefix(&["x", "y", "z"]))
}

fn xyz_opt<S2: Serializer>(t: &Option<Term>, s: S2) -> std::result::Result<S2::Ok, S2::Error> {
    match t {
        Some(t) => s.serialize_some(&t.to_prefix(&["x", "y", "z"])),
        None => s.serialize_none(),
    }
}

fn slots5<S2: Serializer>(t: &Term, s: S2) -> std::result::Result<S2::Ok, S2::Error> {
    s.serialize_str(&t.to_prefix(&["v1", "v2", "v3", "v4", "v5"]))
}

fn slots5_opt<S2: Serializer>(t: &Option<Term>, s: S2) -> std::result::Result<S2::Ok, S2::Error> {
    match t {
        Some(t) => s.serialize_some(&t.to_prefix(&["v1", "v2", "v3", "v4", "v5"])),
        None => s.serialize_none(),
    }
}

/// A ternary witness and the intermediate terms it was extracted from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalcevWitness {
    #[serde(serialize_with = "xyz")]
    pub term: Term,
    pub route: Route,
    /// Membership witness over the generator slots of `S`.
    #[serde(serialize_with = "slots5")]
    pub u: Term,
    /// Two generators: `t(x,y,y)` as a binary term. Three generators:
    /// the left element `u(x,y,x,y,z)`.
    #[serde(serialize_with = "xyz_opt")]
    pub t1: Option<Term>,
    /// Two generators: `t(x,x,y)`. Three generators: `u(y,z,x,y,z)`.
    #[serde(serialize_with = "xyz_opt")]
    pub t2: Option<Term>,
    /// Three generators only: `t'(v1..v5) = u(v4,v5,v1,v2,v3)`.
    #[serde(serialize_with = "slots5_opt")]
    pub t_prime: Option<Term>,
}

/// `S` on a free algebra with a witness term per pair.
#[derive(Debug, Clone)]
pub struct PrincipalRelation {
    /// The free algebra as a concrete algebra on `0..|X|`.
    pub algebra: FiniteAlgebra,
    pub relation: AdmissibleRelation,
    closure: Closure<usize>,
    positions: HashMap<usize, usize>,
}

impl PrincipalRelation {
    fn build(
        free: &FreeAlgebraRepr,
        slots: &[(usize, usize)],
        caps: &Caps,
    ) -> Result<PrincipalRelation> {
        let algebra = free.to_algebra(caps)?;
        let n = algebra.size();
        if n.checked_mul(n)
            .is_none_or(|sq| sq > caps.max_power_carrier)
        {
            return Err(Error::cap(
                "free algebra square",
                caps.max_power_carrier,
                n.saturating_mul(n),
            ));
        }
        let closure = pair_closure(&algebra, slots, true)?;
        let mut relation = BinaryRelation::empty(n);
        let mut positions = HashMap::with_capacity(closure.elements.len());
        for (i, &code) in closure.elements.iter().enumerate() {
            relation.insert(code / n, code % n);
            positions.insert(code, i);
        }
        let relation = AdmissibleRelation::new(&algebra, relation)?;
        Ok(PrincipalRelation {
            algebra,
            relation,
            closure,
            positions,
        })
    }

    /// Witness over the generator slots for `(a, b) ∈ S`.
    pub fn witness(&self, a: usize, b: usize) -> Option<Term> {
        let n = self.algebra.size();
        let idx = *self.positions.get(&(a * n + b))?;
        Some(self.closure.term(idx, &self.algebra.op_names()))
    }
}

/// `S` on the 2-generated free algebra: generated by `(x,y), (x,x), (y,y)`.
pub fn principal_free_relation(x: &FreeAlgebraRepr, caps: &Caps) -> Result<PrincipalRelation> {
    if x.generator_count() != 2 {
        return Err(Error::InvalidArgument(
            "principal relation needs a 2-generated free algebra".into(),
        ));
    }
    let g = x.generator_indices();
    PrincipalRelation::build(x, &[(g[0], g[1]), (g[0], g[0]), (g[1], g[1])], caps)
}

/// `S` on the 3-generated free algebra: generated by `(x,y), (y,z)` and the
/// diagonal generators.
pub fn chain_free_relation(x: &FreeAlgebraRepr, caps: &Caps) -> Result<PrincipalRelation> {
    if x.generator_count() != 3 {
        return Err(Error::InvalidArgument(
            "chain relation needs a 3-generated free algebra".into(),
        ));
    }
    let g = x.generator_indices();
    PrincipalRelation::build(
        x,
        &[
            (g[0], g[1]),
            (g[1], g[2]),
            (g[0], g[0]),
            (g[1], g[1]),
            (g[2], g[2]),
        ],
        caps,
    )
}

/// Free algebra and images of `S` under both operators.
struct TwoGenerated {
    s: PrincipalRelation,
    fs: AdmissibleRelation,
    gs: AdmissibleRelation,
    x: usize,
    y: usize,
}

fn two_generated(
    alg: &FiniteAlgebra,
    f: &RelationOperator,
    g: &RelationOperator,
    caps: &Caps,
) -> Result<TwoGenerated> {
    let free = free_algebra(alg, 2, caps)?;
    let s = principal_free_relation(&free, caps)?;
    let fs = apply_operator(f, &s.algebra, &s.relation)?;
    let gs = apply_operator(g, &s.algebra, &s.relation)?;
    let gens = free.generator_indices();
    Ok(TwoGenerated {
        x: gens[0],
        y: gens[1],
        s,
        fs,
        gs,
    })
}

/// Least `(p, q)` with `(x,p) ∈ F(S)`, `(q,p) ∈ S`, `(q,y) ∈ G(S)`.
fn search_pair(ctx: &TwoGenerated) -> Option<(usize, usize)> {
    let n = ctx.s.algebra.size();
    ctx.fs.successors(ctx.x).find_map(|p| {
        (0..n)
            .find(|&q| ctx.s.relation.contains(q, p) && ctx.gs.contains(q, ctx.y))
            .map(|q| (p, q))
    })
}

fn extract_two(ctx: &TwoGenerated, p: usize, q: usize, route: Route) -> MalcevWitness {
    let u = ctx.s.witness(q, p).expect("pair lies in S");
    let term = u.substitute(&[Term::Var(1), Term::Var(0), Term::Var(2)]);
    let t1 = term.substitute(&[Term::Var(0), Term::Var(1), Term::Var(1)]);
    let t2 = term.substitute(&[Term::Var(0), Term::Var(0), Term::Var(1)]);
    MalcevWitness {
        term,
        route,
        u,
        t1: Some(t1),
        t2: Some(t2),
        t_prime: None,
    }
}

/// Searches for `p, q` in the 2-generated free algebra with
/// `x F(S) p`, `(q, p) ∈ S` and `q G(S) y`; the witness term satisfies
/// `t(x,y,y) = p` and `t(x,x,y) = q`.
pub fn find_term_cond_iv(
    alg: &FiniteAlgebra,
    f: &RelationOperator,
    g: &RelationOperator,
    caps: &Caps,
) -> Result<Option<MalcevWitness>> {
    let ctx = two_generated(alg, f, g, caps)?;
    Ok(search_pair(&ctx).map(|(p, q)| extract_two(&ctx, p, q, Route::Iv)))
}

/// Tests `(x,y) ∈ F(S) ∘ S⁻ ∘ G(S)` (or all of `S` in full mode) on the
/// 2-generated free algebra. Shares the search with [`find_term_cond_iv`].
pub fn check_cond_x(
    alg: &FiniteAlgebra,
    f: &RelationOperator,
    g: &RelationOperator,
    mode: InclusionMode,
    caps: &Caps,
) -> Result<Option<MalcevWitness>> {
    let ctx = two_generated(alg, f, g, caps)?;
    if mode == InclusionMode::Full {
        let rhs = ctx
            .fs
            .compose(&ctx.s.relation.relation().converse())?
            .compose(&ctx.gs)?;
        if !ctx.s.relation.is_subset_of(&rhs) {
            return Ok(None);
        }
    }
    Ok(search_pair(&ctx).map(|(p, q)| extract_two(&ctx, p, q, Route::X)))
}

/// Tests `(x,z) ∈ F(S) ∘ S ∘ G(S)` (or `S ∘ S ⊆ F(S) ∘ S ∘ G(S)` in full
/// mode) on the 3-generated free algebra and extracts `t(x,y,z) = t'(x,y,z,x,z)`.
pub fn check_cond_vii(
    alg: &FiniteAlgebra,
    f: &RelationOperator,
    g: &RelationOperator,
    mode: InclusionMode,
    caps: &Caps,
) -> Result<Option<MalcevWitness>> {
    let free = free_algebra(alg, 3, caps)?;
    let s = chain_free_relation(&free, caps)?;
    let fs = apply_operator(f, &s.algebra, &s.relation)?;
    let gs = apply_operator(g, &s.algebra, &s.relation)?;
    if mode == InclusionMode::Full {
        let lhs = s.relation.compose(&s.relation)?;
        let rhs = fs.compose(&s.relation)?.compose(&gs)?;
        if !lhs.is_subset_of(&rhs) {
            return Ok(None);
        }
    }
    let gens = free.generator_indices();
    let (x, z) = (gens[0], gens[2]);
    let found = fs.successors(x).find_map(|b| {
        s.relation
            .successors(b)
            .find(|&c| gs.contains(c, z))
            .map(|c| (b, c))
    });
    let Some((b, c)) = found else {
        return Ok(None);
    };
    let u = s.witness(b, c).expect("pair lies in S");
    let v = |i| Term::Var(i);
    let t1 = u.substitute(&[v(0), v(1), v(0), v(1), v(2)]);
    let t2 = u.substitute(&[v(1), v(2), v(0), v(1), v(2)]);
    let t_prime = u.substitute(&[v(3), v(4), v(0), v(1), v(2)]);
    let term = t_prime.substitute(&[v(0), v(1), v(2), v(0), v(2)]);
    Ok(Some(MalcevWitness {
        term,
        route: Route::Vii,
        u,
        t1: Some(t1),
        t2: Some(t2),
        t_prime: Some(t_prime),
    }))
}

/// Runs the chosen route in single-pair mode.
pub fn find_term(
    alg: &FiniteAlgebra,
    f: &RelationOperator,
    g: &RelationOperator,
    route: Route,
    caps: &Caps,
) -> Result<Option<MalcevWitness>> {
    match route {
        Route::Iv => find_term_cond_iv(alg, f, g, caps),
        Route::Vii => check_cond_vii(alg, f, g, InclusionMode::SinglePair, caps),
        Route::X => check_cond_x(alg, f, g, InclusionMode::SinglePair, caps),
    }
}

/// Which side of the definition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MalcevSide {
    /// `(a, t(a,b,b)) ∉ F(R)`.
    Left,
    /// `(t(a,a,b), b) ∉ G(R)`.
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalcevViolation {
    pub algebra: String,
    pub relation: BinaryRelation,
    pub a: usize,
    pub b: usize,
    pub side: MalcevSide,
    /// `t(a,b,b)` or `t(a,a,b)`.
    pub value: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalcevReport {
    pub algebras: usize,
    pub relations: usize,
    pub pairs: usize,
    pub violations: Vec<MalcevViolation>,
}

impl MalcevReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the defining memberships of `t` for every algebra, every supplied
/// relation and every related pair.
pub fn verify_malcev_term(
    family: &[FiniteAlgebra],
    t: &Term,
    f: &RelationOperator,
    g: &RelationOperator,
    relations: &[Vec<AdmissibleRelation>],
) -> Result<MalcevReport> {
    if family.len() != relations.len() {
        return Err(Error::InvalidArgument(
            "one relation list per algebra is required".into(),
        ));
    }
    if t.var_bound() > 3 {
        return Err(Error::InvalidArgument(format!("{t} is not ternary")));
    }
    let mut report = MalcevReport {
        algebras: family.len(),
        relations: 0,
        pairs: 0,
        violations: Vec::new(),
    };
    for (alg, rels) in family.iter().zip(relations) {
        let n = alg.size();
        let table = t.operation_table(alg, 3)?;
        let at = |a: usize, b: usize, c: usize| table[(a * n + b) * n + c];
        for r in rels {
            report.relations += 1;
            let fr = apply_operator(f, alg, r)?;
            let gr = apply_operator(g, alg, r)?;
            for (a, b) in r.pairs() {
                report.pairs += 1;
                let left = at(a, b, b);
                if !fr.contains(a, left) {
                    report.violations.push(MalcevViolation {
                        algebra: alg.name().to_string(),
                        relation: r.relation().clone(),
                        a,
                        b,
                        side: MalcevSide::Left,
                        value: left,
                    });
                }
                let right = at(a, a, b);
                if !gr.contains(right, b) {
                    report.violations.push(MalcevViolation {
                        algebra: alg.name().to_string(),
                        relation: r.relation().clone(),
                        a,
                        b,
                        side: MalcevSide::Right,
                        value: right,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Carriers at most this large get exhaustive relation lists in
/// [`soundness_family`]; larger ones get the single-pair generated ones.
pub const EXHAUSTIVE_RELATIONS_MAX_CARRIER: usize = 4;

/// Relations to test an algebra against: every admissible relation when
/// the carrier is small and the enumeration completes, otherwise the
/// relations generated by single pairs (enough for monotone operators,
/// since any `R` with `aRb` contains the one generated by `(a, b)`).
pub fn test_relations(alg: &FiniteAlgebra) -> Result<Vec<AdmissibleRelation>> {
    if alg.size() <= EXHAUSTIVE_RELATIONS_MAX_CARRIER {
        let all = enumerate_admissible(alg, 4096)?;
        if all.complete {
            return Ok(all.relations);
        }
    }
    let n = alg.size();
    let mut out: Vec<AdmissibleRelation> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let r = generated_admissible(alg, &[(a, b)])?;
            if !out.contains(&r) {
                out.push(r);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// `alg`, its proper subalgebras, and `alg²`, each with its test relations.
pub fn soundness_family(
    alg: &FiniteAlgebra,
    caps: &Caps,
) -> Result<(Vec<FiniteAlgebra>, Vec<Vec<AdmissibleRelation>>)> {
    let mut family = vec![alg.clone()];
    for (i, universe) in subuniverses(alg)?.into_iter().enumerate() {
        if universe.len() < alg.size() {
            let (sub, _) = alg.subalgebra(&universe)?;
            family.push(sub.with_name(format!("{}[sub{i}]", alg.name())));
        }
    }
    family.push(alg.product_power(2, caps)?);
    let relations = family
        .iter()
        .map(test_relations)
        .collect::<Result<Vec<_>>>()?;
    Ok((family, relations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissible::admissible_closure;
    use crate::algebra::Operation;

    fn binary(name: &str, n: usize, op: &str, table: Vec<u32>) -> FiniteAlgebra {
        FiniteAlgebra::new(
            name,
            n,
            vec![Operation {
                name: op.into(),
                arity: 2,
                table,
            }],
        )
        .unwrap()
    }

    fn z2() -> FiniteAlgebra {
        binary("z2", 2, "add", vec![0, 1, 1, 0])
    }

    fn sl2() -> FiniteAlgebra {
        binary("sl2", 2, "meet", vec![0, 0, 0, 1])
    }

    fn lattice2() -> FiniteAlgebra {
        FiniteAlgebra::new(
            "lattice2",
            2,
            vec![
                Operation {
                    name: "meet".into(),
                    arity: 2,
                    table: vec![0, 0, 0, 1],
                },
                Operation {
                    name: "join".into(),
                    arity: 2,
                    table: vec![0, 1, 1, 1],
                },
            ],
        )
        .unwrap()
    }

    fn op(s: &str) -> RelationOperator {
        RelationOperator::parse(s).unwrap()
    }

    fn caps() -> Caps {
        Caps::default()
    }

    /// Oracle: the memberships of the definition, checked directly on
    /// every admissible relation of `alg`.
    fn is_malcev_modulo(
        alg: &FiniteAlgebra,
        t: &Term,
        f: &RelationOperator,
        g: &RelationOperator,
    ) -> bool {
        let rels = enumerate_admissible(alg, 10_000).unwrap().relations;
        rels.iter().all(|r| {
            let fr = apply_operator(f, alg, r).unwrap();
            let gr = apply_operator(g, alg, r).unwrap();
            r.pairs().all(|(a, b)| {
                fr.contains(a, t.eval(alg, &[a, b, b]).unwrap())
                    && gr.contains(t.eval(alg, &[a, a, b]).unwrap(), b)
            })
        })
    }

    #[test]
    fn principal_relation_on_free_semilattice() {
        let alg = sl2();
        let free = free_algebra(&alg, 2, &caps()).unwrap();
        let s = principal_free_relation(&free, &caps()).unwrap();
        // Oracle: close the three generator pairs under coordinatewise meet.
        let x = &s.algebra;
        let mut pairs = vec![(0, 1), (0, 0), (1, 1)];
        loop {
            let mut grew = false;
            for i in 0..pairs.len() {
                for j in 0..pairs.len() {
                    let (a, b) = pairs[i];
                    let (c, d) = pairs[j];
                    let p = (x.apply(0, &[a, c]), x.apply(0, &[b, d]));
                    if !pairs.contains(&p) {
                        pairs.push(p);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let expected = BinaryRelation::from_pairs(x.size(), pairs).unwrap();
        assert_eq!(s.relation.relation(), &expected);
        assert!(expected.is_reflexive());
        for (a, b) in s.relation.pairs() {
            let u = s.witness(a, b).unwrap();
            let free_u_left = u.substitute(&[Term::Var(0), Term::Var(0), Term::Var(1)]);
            let free_u_right = u.substitute(&[Term::Var(1), Term::Var(0), Term::Var(1)]);
            assert_eq!(free.element_of_term(&free_u_left).unwrap(), a);
            assert_eq!(free.element_of_term(&free_u_right).unwrap(), b);
        }
    }

    #[test]
    fn principal_relation_on_trivial_and_z2() {
        let one = FiniteAlgebra::new("one", 1, vec![]).unwrap();
        let free = free_algebra(&one, 2, &caps()).unwrap();
        let s = principal_free_relation(&free, &caps()).unwrap();
        assert_eq!(s.relation.len(), 1);

        let free = free_algebra(&z2(), 2, &caps()).unwrap();
        let s = principal_free_relation(&free, &caps()).unwrap();
        // Subgroup of X² generated by three pairs in a 4-element group
        // without constants: it contains the diagonal and (x, y).
        assert!(s.relation.is_reflexive());
        let x = free.generator_indices()[0];
        let y = free.generator_indices()[1];
        assert!(s.relation.contains(x, y));
        let oracle = admissible_closure(
            &s.algebra,
            &BinaryRelation::from_pairs(4, [(x, y)]).unwrap(),
        )
        .unwrap();
        assert_eq!(s.relation, oracle);
    }

    #[test]
    fn exact_malcev_term_on_z2() {
        let alg = z2();
        let w = find_term_cond_iv(&alg, &op("diag"), &op("diag"), &caps())
            .unwrap()
            .expect("z2 has a Mal'cev term");
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(w.term.eval(&alg, &[a, b, b]).unwrap(), a);
                assert_eq!(w.term.eval(&alg, &[a, a, b]).unwrap(), b);
                for c in 0..2 {
                    assert_eq!(w.term.eval(&alg, &[a, b, c]).unwrap(), a ^ b ^ c);
                }
            }
        }
        let x = check_cond_x(
            &alg,
            &op("diag"),
            &op("diag"),
            InclusionMode::SinglePair,
            &caps(),
        )
        .unwrap()
        .unwrap();
        assert_eq!(x.term, w.term);
        assert!(
            check_cond_x(&alg, &op("diag"), &op("diag"), InclusionMode::Full, &caps())
                .unwrap()
                .is_some()
        );
        let vii = check_cond_vii(
            &alg,
            &op("diag"),
            &op("diag"),
            InclusionMode::SinglePair,
            &caps(),
        )
        .unwrap()
        .unwrap();
        assert!(is_malcev_modulo(&alg, &vii.term, &op("diag"), &op("diag")));
    }

    #[test]
    fn semilattice_and_lattice_have_no_exact_term() {
        for alg in [sl2(), lattice2()] {
            for route in [Route::Iv, Route::Vii, Route::X] {
                assert!(find_term(&alg, &op("diag"), &op("diag"), route, &caps())
                    .unwrap()
                    .is_none());
            }
        }
    }

    #[test]
    fn semilattice_modulo_congruence_closure() {
        let alg = sl2();
        for route in [Route::Iv, Route::Vii, Route::X] {
            let w = find_term(&alg, &op("cg"), &op("cg"), route, &caps())
                .unwrap()
                .expect("witness modulo cg");
            assert_eq!(w.route, route);
            assert!(is_malcev_modulo(&alg, &w.term, &op("cg"), &op("cg")));
        }
        // The meet of all three variables works too.
        let meet3 = Term::app(
            "meet",
            vec![
                Term::app("meet", vec![Term::var(0), Term::var(1)]),
                Term::var(2),
            ],
        );
        assert!(is_malcev_modulo(&alg, &meet3, &op("cg"), &op("cg")));
    }

    #[test]
    fn full_operators_always_admit_a_witness() {
        for alg in [sl2(), lattice2(), z2()] {
            for route in [Route::Iv, Route::Vii, Route::X] {
                let w = find_term(&alg, &op("full"), &op("full"), route, &caps()).unwrap();
                assert!(w.is_some());
            }
        }
    }

    #[test]
    fn extraction_identities_hold() {
        let alg = z2();
        for (f, g) in [("diag", "diag"), ("cg", "cg"), ("tc", "tol")] {
            let w = check_cond_vii(&alg, &op(f), &op(g), InclusionMode::SinglePair, &caps())
                .unwrap()
                .unwrap();
            let tp = w.t_prime.as_ref().unwrap();
            let t1 = w.t1.as_ref().unwrap();
            let t2 = w.t2.as_ref().unwrap();
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        let t = |x, y, z| w.term.eval(&alg, &[x, y, z]).unwrap();
                        assert_eq!(t(a, b, c), tp.eval(&alg, &[a, b, c, a, c]).unwrap());
                        assert_eq!(t(a, b, b), t1.eval(&alg, &[a, b, b]).unwrap());
                        assert_eq!(t(b, b, c), t2.eval(&alg, &[b, b, c]).unwrap());
                    }
                }
            }
        }
        let w = find_term_cond_iv(&sl2(), &op("cg"), &op("cg"), &caps())
            .unwrap()
            .unwrap();
        let free = free_algebra(&sl2(), 2, &caps()).unwrap();
        let p = w.t1.as_ref().unwrap();
        let q = w.t2.as_ref().unwrap();
        assert_eq!(
            free.element_of_term(p).unwrap(),
            free.element_of_term(
                &w.term
                    .substitute(&[Term::var(0), Term::var(1), Term::var(1)])
            )
            .unwrap()
        );
        assert!(free.element_of_term(q).is_ok());
    }

    #[test]
    fn verify_reports_violations() {
        let alg = sl2();
        let meet3 = Term::app(
            "meet",
            vec![
                Term::app("meet", vec![Term::var(0), Term::var(1)]),
                Term::var(2),
            ],
        );
        let r = generated_admissible(&alg, &[(0, 1)]).unwrap();
        let report = verify_malcev_term(
            std::slice::from_ref(&alg),
            &meet3,
            &op("diag"),
            &op("diag"),
            &[vec![r]],
        )
        .unwrap();
        assert_eq!(
            report.violations,
            vec![MalcevViolation {
                algebra: "sl2".into(),
                relation: BinaryRelation::from_pairs(2, [(0, 0), (0, 1), (1, 1)]).unwrap(),
                a: 0,
                b: 1,
                side: MalcevSide::Right,
                value: 0,
            }]
        );
        // The diagonal never fails.
        let any = Term::var(1);
        let report = verify_malcev_term(
            std::slice::from_ref(&alg),
            &any,
            &op("diag"),
            &op("diag"),
            &[vec![AdmissibleRelation::diagonal(&alg)]],
        )
        .unwrap();
        assert!(report.passed());
        assert_eq!(report.pairs, 2);
    }

    #[test]
    fn z2_witness_survives_the_soundness_family() {
        let alg = z2();
        let w = find_term_cond_iv(&alg, &op("diag"), &op("diag"), &caps())
            .unwrap()
            .unwrap();
        let (family, rels) = soundness_family(&alg, &caps()).unwrap();
        assert_eq!(family.len(), 3); // z2, {0}, z2²
        let report = verify_malcev_term(&family, &w.term, &op("diag"), &op("diag"), &rels).unwrap();
        assert!(report.passed());
        assert_eq!(rels[2].len(), 5); // subgroups of Z2² as congruences
    }

    #[test]
    fn witness_serializes_over_xyz() {
        let w = find_term_cond_iv(&z2(), &op("diag"), &op("diag"), &caps())
            .unwrap()
            .unwrap();
        let json = serde_json::to_value(&w).unwrap();
        assert_eq!(json["route"], "iv");
        let term = json["term"].as_str().unwrap();
        assert!(term.contains('x') && term.contains('y') && term.contains('z'));
    }
}
