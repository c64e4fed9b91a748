//! Operators on reflexive compatible relations and their empirical checks.
//!
//! An operator is a description instantiated uniformly on every algebra it
//! is applied to. Built-in kinds map admissible relations to admissible
//! relations by construction; user-supplied kinds have their output checked
//! on every application.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::admissible::{
    congruence_closure, incompatible_operation, tolerance_closure, AdmissibleRelation,
};
use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::expr::{eval_rel_expr, EvalContext, RelExpr};
use crate::hom::{map_relation, Homomorphism};
use crate::relation::BinaryRelation;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    ConstDiag,
    Identity,
    ConstFull,
    TransitiveClosure,
    ToleranceClosure,
    CongruenceClosure,
    Converse,
    /// `R ↦ R^k`.
    PowerK(usize),
    /// `R ↦ R + R⁻`.
    SumWithConverse,
    /// `[F1, F2]` is `R ↦ F1(F2(R))`.
    Composite(Vec<RelationOperator>),
    /// `[F1, F2, F3]` is `R ↦ F1(R) ∘ F2(R) ∘ F3(R)`.
    PointwiseCompose(Vec<RelationOperator>),
    /// `R ↦ F(F(R))`.
    SquareOf(Box<RelationOperator>),
    /// A relational expression in the single variable `R`.
    Template(RelExpr),
    /// `full` when `Δ ⊊ R ⊊ full`, otherwise `Δ`; a non-monotone probe.
    FullIfNontrivial,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationOperator {
    pub name: String,
    pub kind: OperatorKind,
}

impl RelationOperator {
    /// Operator named by its canonical spec string.
    pub fn from_kind(kind: OperatorKind) -> Self {
        let name = spec_string(&kind);
        RelationOperator { name, kind }
    }

    /// Parses the operator syntax:
    ///
    /// ```text
    /// spec      := composite ('*' composite)*     pointwise composition
    /// composite := atom ('.' atom)*               F.G is R ↦ F(G(R))
    /// atom      := diag | id | full | tc | tol | cg | conv | pow:K | sum-conv
    ///            | full-if-nontrivial | sq(spec) | (spec) | expr:<RelExpr in R>
    /// ```
    ///
    /// An `expr:` body extends to the first unmatched `)`, `.` or `*`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = SpecParser { text, pos: 0 };
        let kind = p.pointwise()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(Error::Parse {
                offset: p.pos,
                message: "trailing input in operator spec".into(),
            });
        }
        Ok(Self::from_kind(kind))
    }

    /// True for the kinds whose output is admissible by construction.
    pub fn is_builtin(&self) -> bool {
        match &self.kind {
            OperatorKind::Template(_) => false,
            OperatorKind::Composite(ops) | OperatorKind::PointwiseCompose(ops) => {
                ops.iter().all(RelationOperator::is_builtin)
            }
            OperatorKind::SquareOf(inner) => inner.is_builtin(),
            _ => true,
        }
    }
}

impl fmt::Display for RelationOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl Serialize for RelationOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name)
    }
}

fn spec_string(kind: &OperatorKind) -> String {
    use OperatorKind::*;
    match kind {
        ConstDiag => "diag".into(),
        Identity => "id".into(),
        ConstFull => "full".into(),
        TransitiveClosure => "tc".into(),
        ToleranceClosure => "tol".into(),
        CongruenceClosure => "cg".into(),
        Converse => "conv".into(),
        PowerK(k) => format!("pow:{k}"),
        SumWithConverse => "sum-conv".into(),
        FullIfNontrivial => "full-if-nontrivial".into(),
        SquareOf(inner) => format!("sq({})", inner.name),
        Template(e) => format!("expr:{e}"),
        Composite(ops) => ops
            .iter()
            .map(|o| match o.kind {
                PointwiseCompose(_) => format!("({})", o.name),
                _ => o.name.clone(),
            })
            .collect::<Vec<_>>()
            .join("."),
        PointwiseCompose(ops) => ops
            .iter()
            .map(|o| match o.kind {
                PointwiseCompose(_) => format!("({})", o.name),
                _ => o.name.clone(),
            })
            .collect::<Vec<_>>()
            .join("*"),
    }
}

struct SpecParser<'a> {
    text: &'a str,
    pos: usize,
}

impl SpecParser<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn pointwise(&mut self) -> Result<OperatorKind> {
        let mut parts = vec![self.composite()?];
        while self.eat("*") {
            parts.push(self.composite()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            OperatorKind::PointwiseCompose(
                parts.into_iter().map(RelationOperator::from_kind).collect(),
            )
        })
    }

    fn composite(&mut self) -> Result<OperatorKind> {
        let mut parts = vec![self.atom()?];
        while self.eat(".") {
            parts.push(self.atom()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            OperatorKind::Composite(parts.into_iter().map(RelationOperator::from_kind).collect())
        })
    }

    fn atom(&mut self) -> Result<OperatorKind> {
        use OperatorKind::*;
        self.skip_ws();
        if self.eat("expr:") {
            // The body runs to the first unmatched `)`, `.` or `*`; none of
            // those can appear at depth zero in a relational expression.
            let start = self.pos;
            let mut depth = 0usize;
            let mut end = self.text.len();
            for (i, c) in self.rest().char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' if depth == 0 => {
                        end = start + i;
                        break;
                    }
                    ')' => depth -= 1,
                    '.' | '*' if depth == 0 => {
                        end = start + i;
                        break;
                    }
                    _ => {}
                }
            }
            let raw = &self.text[start..end];
            let lead = raw.len() - raw.trim_start().len();
            let body = raw.trim().to_string();
            self.pos = end;
            if body == "full-if-nontrivial" {
                return Ok(FullIfNontrivial);
            }
            let expr = RelExpr::parse(&body).map_err(|e| match e {
                Error::Parse { offset, message } => Error::Parse {
                    offset: offset + start + lead,
                    message,
                },
                other => other,
            })?;
            if let Some(v) = expr.variables().into_iter().find(|v| v != "R") {
                return Err(Error::UnboundName(v));
            }
            return Ok(Template(expr));
        }
        if self.eat("sq(") {
            let inner = self.pointwise()?;
            if !self.eat(")") {
                return self.error("expected `)`");
            }
            return Ok(SquareOf(Box::new(RelationOperator::from_kind(inner))));
        }
        if self.eat("(") {
            let inner = self.pointwise()?;
            if !self.eat(")") {
                return self.error("expected `)`");
            }
            return Ok(inner);
        }
        if self.eat("pow:") {
            let digits: String = self
                .rest()
                .chars()
                .take_while(char::is_ascii_digit)
                .collect();
            let Ok(k) = digits.parse() else {
                return self.error("expected exponent after `pow:`");
            };
            self.pos += digits.len();
            return Ok(PowerK(k));
        }
        // Longest keywords first so `full` does not shadow `full-if-nontrivial`.
        for (word, kind) in [
            ("full-if-nontrivial", FullIfNontrivial),
            ("sum-conv", SumWithConverse),
            ("diag", ConstDiag),
            ("full", ConstFull),
            ("conv", Converse),
            ("tol", ToleranceClosure),
            ("id", Identity),
            ("tc", TransitiveClosure),
            ("cg", CongruenceClosure),
        ] {
            if self.eat(word) {
                return Ok(kind);
            }
        }
        self.error("unknown operator")
    }
}

/// Applies `op` to `r` on `alg`.
pub fn apply_operator(
    op: &RelationOperator,
    alg: &FiniteAlgebra,
    r: &AdmissibleRelation,
) -> Result<AdmissibleRelation> {
    use OperatorKind::*;
    if r.carrier_size() != alg.size() {
        return Err(Error::CarrierMismatch {
            left: alg.size(),
            right: r.carrier_size(),
        });
    }
    let n = alg.size();
    let raw: BinaryRelation = match &op.kind {
        ConstDiag => BinaryRelation::diagonal(n),
        Identity => r.relation().clone(),
        ConstFull => BinaryRelation::full(n),
        TransitiveClosure => r.transitive_closure(),
        ToleranceClosure => tolerance_closure(alg, r)?.into(),
        CongruenceClosure => congruence_closure(alg, r)?.into(),
        Converse => r.relation().converse(),
        PowerK(k) => r.power(*k),
        SumWithConverse => r.rel_sum(&r.relation().converse())?,
        Composite(ops) => {
            let mut acc = r.clone();
            for inner in ops.iter().rev() {
                acc = apply_operator(inner, alg, &acc)?;
            }
            return Ok(acc);
        }
        PointwiseCompose(ops) => {
            let mut acc = BinaryRelation::diagonal(n);
            for inner in ops {
                acc = acc.compose(apply_operator(inner, alg, r)?.relation())?;
            }
            acc
        }
        SquareOf(inner) => {
            let once = apply_operator(inner, alg, r)?;
            return apply_operator(inner, alg, &once);
        }
        Template(expr) => {
            let env: HashMap<String, BinaryRelation> =
                [("R".to_string(), r.relation().clone())].into();
            let ops = HashMap::new();
            eval_rel_expr(expr, &EvalContext::new(alg, &env, &ops))?.relation
        }
        FullIfNontrivial => {
            if r.len() > n && r.len() < n * n {
                BinaryRelation::full(n)
            } else {
                BinaryRelation::diagonal(n)
            }
        }
    };
    if matches!(op.kind, Template(_)) {
        if !raw.is_reflexive() {
            return Err(Error::OperatorOutput {
                operator: op.name.clone(),
                reason: "output is not reflexive".into(),
            });
        }
        if let Some(bad) = incompatible_operation(alg, &raw) {
            return Err(Error::OperatorOutput {
                operator: op.name.clone(),
                reason: format!("output is not closed under `{bad}`"),
            });
        }
    }
    Ok(AdmissibleRelation::new_unchecked(raw))
}

/// `F^(2)`: `R ↦ F(F(R))`.
pub fn square_operator(op: &RelationOperator) -> RelationOperator {
    RelationOperator::from_kind(OperatorKind::SquareOf(Box::new(op.clone())))
}

/// `R ↦ c ∘ c ∘ c` with `c = F(F(R))`.
pub fn triple_pointwise(op: &RelationOperator) -> RelationOperator {
    let sq = square_operator(op);
    RelationOperator::from_kind(OperatorKind::PointwiseCompose(vec![
        sq.clone(),
        sq.clone(),
        sq,
    ]))
}

/// All pairs `(R, S)` from `rels` with `R ⊆ S`.
pub fn nested_pairs(rels: &[AdmissibleRelation]) -> Vec<(AdmissibleRelation, AdmissibleRelation)> {
    let mut out = Vec::new();
    for r in rels {
        for s in rels {
            if r.is_subset_of(s) {
                out.push((r.clone(), s.clone()));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotoneViolation {
    pub smaller: BinaryRelation,
    pub larger: BinaryRelation,
    pub image_of_smaller: BinaryRelation,
    pub image_of_larger: BinaryRelation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotoneReport {
    pub operator: String,
    pub algebra: String,
    pub pairs_checked: usize,
    /// First failing pair in input order.
    pub counterexample: Option<MonotoneViolation>,
}

impl MonotoneReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks `F(R) ⊆ F(S)` on each supplied pair with `R ⊆ S`.
pub fn check_monotone(
    op: &RelationOperator,
    alg: &FiniteAlgebra,
    pairs: &[(AdmissibleRelation, AdmissibleRelation)],
) -> Result<MonotoneReport> {
    let mut report = MonotoneReport {
        operator: op.name.clone(),
        algebra: alg.name().to_string(),
        pairs_checked: 0,
        counterexample: None,
    };
    for (r, s) in pairs {
        if !r.is_subset_of(s) {
            return Err(Error::InvalidArgument(format!(
                "monotonicity sample {r} is not contained in {s}"
            )));
        }
        report.pairs_checked += 1;
        let fr = apply_operator(op, alg, r)?;
        let fs = apply_operator(op, alg, s)?;
        if !fr.is_subset_of(&fs) {
            report.counterexample = Some(MonotoneViolation {
                smaller: r.relation().clone(),
                larger: s.relation().clone(),
                image_of_smaller: fr.into(),
                image_of_larger: fs.into(),
            });
            break;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomViolation {
    pub source: String,
    pub target: String,
    pub map: Vec<usize>,
    pub relation: BinaryRelation,
    /// `φ(F_B(R))`.
    pub image_of_operator: BinaryRelation,
    /// `F_A(φ(R))`.
    pub operator_of_image: BinaryRelation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomReport {
    pub operator: String,
    pub homs_checked: usize,
    pub instances: usize,
    pub violations: Vec<HomViolation>,
}

impl HomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `φ(F_B(R)) ⊆ F_A(φ(R))` for every `φ: B → A` in `homs` and every
/// sample relation of `B`. Samples are looked up by source algebra name.
pub fn check_hom_property(
    op: &RelationOperator,
    homs: &[Homomorphism],
    samples: &HashMap<String, Vec<AdmissibleRelation>>,
) -> Result<HomReport> {
    let mut report = HomReport {
        operator: op.name.clone(),
        homs_checked: 0,
        instances: 0,
        violations: Vec::new(),
    };
    for h in homs {
        let source = h.source();
        let target = h.target();
        let rels = samples
            .get(source.name())
            .ok_or_else(|| Error::UnboundName(source.name().to_string()))?;
        report.homs_checked += 1;
        for r in rels {
            report.instances += 1;
            let lhs = map_relation(h, apply_operator(op, source, r)?.relation())?;
            let rhs = apply_operator(op, target, &map_relation(h, r)?)?;
            if !lhs.is_subset_of(&rhs) {
                report.violations.push(HomViolation {
                    source: source.name().to_string(),
                    target: target.name().to_string(),
                    map: h.map().to_vec(),
                    relation: r.relation().clone(),
                    image_of_operator: lhs.into(),
                    operator_of_image: rhs.into(),
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissible::{enumerate_admissible, generated_admissible, is_admissible};
    use crate::algebra::Operation;
    use crate::hom::enumerate_homomorphisms;
    use std::sync::Arc;

    fn unary_binary(name: &str, n: usize, table: Vec<u32>) -> FiniteAlgebra {
        FiniteAlgebra::new(
            name,
            n,
            vec![Operation {
                name: "f".into(),
                arity: 2,
                table,
            }],
        )
        .unwrap()
    }

    fn sl2() -> FiniteAlgebra {
        unary_binary("sl2", 2, vec![0, 0, 0, 1])
    }

    fn sl3() -> FiniteAlgebra {
        unary_binary("sl3", 3, vec![0, 0, 0, 0, 1, 1, 0, 1, 2])
    }

    fn z3() -> FiniteAlgebra {
        unary_binary("z3", 3, vec![0, 1, 2, 1, 2, 0, 2, 0, 1])
    }

    fn op(s: &str) -> RelationOperator {
        RelationOperator::parse(s).unwrap()
    }

    fn all_adm(alg: &FiniteAlgebra) -> Vec<AdmissibleRelation> {
        enumerate_admissible(alg, 10_000).unwrap().relations
    }

    #[test]
    fn parses_operator_specs() {
        for (text, canonical) in [
            ("diag", "diag"),
            ("pow:3", "pow:3"),
            ("tc.cg", "tc.cg"),
            ("id*id*id", "id*id*id"),
            ("sq(tc)*sq(tc)*sq(tc)", "sq(tc)*sq(tc)*sq(tc)"),
            ("sq(tc.conv)", "sq(tc.conv)"),
            ("(tc*id).cg", "(tc*id).cg"),
            ("full-if-nontrivial", "full-if-nontrivial"),
            ("expr:full-if-nontrivial", "full-if-nontrivial"),
            ("expr: R o R", "expr:(R o R)"),
            ("sq(expr:R o R)*tc", "sq(expr:(R o R))*tc"),
        ] {
            let parsed = op(text);
            assert_eq!(parsed.name, canonical, "{text}");
            assert_eq!(op(&parsed.name), parsed, "{text}");
        }
        assert_eq!(
            op("tc.cg").kind,
            OperatorKind::Composite(vec![op("tc"), op("cg")])
        );
        assert!(matches!(
            RelationOperator::parse("bogus"),
            Err(Error::Parse { offset: 0, .. })
        ));
        assert!(matches!(
            RelationOperator::parse("tc."),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            RelationOperator::parse("expr:S"),
            Err(Error::UnboundName(_))
        ));
        assert!(!op("expr:R").is_builtin());
        assert!(op("sq(tc)*cg").is_builtin());
    }

    #[test]
    fn constant_and_closure_examples() {
        let alg = sl2();
        let r = generated_admissible(&alg, &[(0, 1)]).unwrap();
        assert_eq!(
            apply_operator(&op("diag"), &alg, &r).unwrap().relation(),
            &BinaryRelation::diagonal(2)
        );
        assert_eq!(
            apply_operator(&op("cg"), &alg, &r).unwrap().relation(),
            &BinaryRelation::full(2)
        );
        assert_eq!(
            apply_operator(&op("sq(tc)"), &alg, &r).unwrap().relation(),
            &r.transitive_closure()
        );
    }

    #[test]
    fn square_and_triple_unfold_their_definitions() {
        for alg in [sl3(), z3()] {
            for base in [
                "id", "full", "tc", "tol", "cg", "conv", "pow:2", "sum-conv", "diag",
            ] {
                let f = op(base);
                let sq = square_operator(&f);
                let triple = triple_pointwise(&f);
                for r in all_adm(&alg) {
                    let once = apply_operator(&f, &alg, &r).unwrap();
                    let twice = apply_operator(&f, &alg, &once).unwrap();
                    assert_eq!(apply_operator(&sq, &alg, &r).unwrap(), twice);
                    let c = twice.relation();
                    assert_eq!(
                        apply_operator(&triple, &alg, &r).unwrap().relation(),
                        &c.compose(c).unwrap().compose(c).unwrap()
                    );
                }
            }
        }
        // Identity squares to identity, pow:2 squares to the fourth power.
        let alg = unary_binary(
            "chain4",
            4,
            vec![0, 0, 0, 0, 0, 1, 1, 1, 0, 1, 2, 2, 0, 1, 2, 3],
        );
        let r = generated_admissible(&alg, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(
            apply_operator(&square_operator(&op("id")), &alg, &r).unwrap(),
            r
        );
        assert_eq!(
            apply_operator(&square_operator(&op("pow:2")), &alg, &r)
                .unwrap()
                .relation(),
            &r.power(4)
        );
        assert_eq!(
            apply_operator(&triple_pointwise(&op("id")), &alg, &r)
                .unwrap()
                .relation(),
            &r.power(3)
        );
        assert_eq!(
            apply_operator(&triple_pointwise(&op("tc")), &alg, &r)
                .unwrap()
                .relation(),
            &r.transitive_closure()
        );
        assert_eq!(
            apply_operator(&triple_pointwise(&op("diag")), &alg, &r)
                .unwrap()
                .relation(),
            &BinaryRelation::diagonal(4)
        );
    }

    #[test]
    fn builtin_outputs_are_admissible() {
        for alg in [sl2(), sl3(), z3()] {
            for spec in [
                "diag",
                "id",
                "full",
                "tc",
                "tol",
                "cg",
                "conv",
                "pow:0",
                "pow:3",
                "sum-conv",
                "tc.conv",
                "cg*tc",
                "sq(tol)",
                "full-if-nontrivial",
            ] {
                for r in all_adm(&alg) {
                    let out = apply_operator(&op(spec), &alg, &r).unwrap();
                    assert!(is_admissible(&alg, &out), "{spec} on {}", alg.name());
                }
            }
        }
    }

    #[test]
    fn template_output_is_checked() {
        let alg = sl2();
        let r = generated_admissible(&alg, &[(0, 1)]).unwrap();
        let good = op("expr: R o conv(R)");
        assert_eq!(
            apply_operator(&good, &alg, &r).unwrap().relation(),
            &r.compose(&r.converse()).unwrap()
        );
        // Accepted exactly when the evaluated output is admissible.
        let sl = sl3();
        let union = op("expr: R u conv(R)");
        for r in all_adm(&sl) {
            let raw = r.union(&r.converse()).unwrap();
            assert_eq!(
                apply_operator(&union, &sl, &r).is_ok(),
                is_admissible(&sl, &raw)
            );
        }
        let leaky = RelationOperator {
            name: "leaky".into(),
            kind: OperatorKind::Template(RelExpr::parse("R").unwrap()),
        };
        let fake = AdmissibleRelation::new_unchecked(
            BinaryRelation::from_pairs(3, [(0, 0), (1, 1), (2, 2), (2, 0)]).unwrap(),
        );
        assert!(matches!(
            apply_operator(&leaky, &sl, &fake),
            Err(Error::OperatorOutput { ref operator, .. }) if operator == "leaky"
        ));
    }

    #[test]
    fn monotonicity_checks() {
        let alg = sl2();
        let pairs = nested_pairs(&all_adm(&alg));
        for spec in ["tc", "diag", "cg", "tol", "id", "full", "sq(cg)*id"] {
            assert!(
                check_monotone(&op(spec), &alg, &pairs).unwrap().passed(),
                "{spec}"
            );
        }
        let probe = op("expr:full-if-nontrivial");
        let r = generated_admissible(&alg, &[(0, 1)]).unwrap();
        let full = AdmissibleRelation::full(&alg);
        let report = check_monotone(&probe, &alg, &[(r.clone(), full.clone())]).unwrap();
        let cex = report.counterexample.expect("probe is not monotone");
        assert_eq!(cex.smaller, *r.relation());
        assert_eq!(cex.image_of_smaller, BinaryRelation::full(2));
        assert_eq!(cex.image_of_larger, BinaryRelation::diagonal(2));
        assert!(check_monotone(&probe, &alg, &[(full, r)]).is_err());
    }

    #[test]
    fn hom_property_between_semilattices() {
        let a = Arc::new(sl2());
        let b = Arc::new(sl3());
        let mut homs = Vec::new();
        for (s, t) in [(&a, &b), (&b, &a), (&a, &a), (&b, &b)] {
            homs.extend(enumerate_homomorphisms(s, t, 100_000).unwrap().homs);
        }
        let samples: HashMap<String, Vec<AdmissibleRelation>> = [
            ("sl2".to_string(), all_adm(&a)),
            ("sl3".to_string(), all_adm(&b)),
        ]
        .into();
        for spec in ["diag", "id", "full", "tc", "tol", "cg"] {
            let report = check_hom_property(&op(spec), &homs, &samples).unwrap();
            assert!(report.passed(), "{spec}: {:?}", report.violations.first());
            assert_eq!(report.homs_checked, homs.len());
        }
    }

    #[test]
    fn hom_property_can_fail() {
        let a = Arc::new(sl2());
        let b = Arc::new(sl3());
        let homs = enumerate_homomorphisms(&b, &a, 100_000).unwrap().homs;
        let samples: HashMap<String, Vec<AdmissibleRelation>> =
            [("sl3".to_string(), all_adm(&b))].into();
        let probe = op("full-if-nontrivial");
        let report = check_hom_property(&probe, &homs, &samples).unwrap();
        // Oracle: recompute every instance directly.
        let mut expected = 0;
        for h in &homs {
            for r in &samples["sl3"] {
                let lhs = map_relation(h, &apply_operator(&probe, &b, r).unwrap()).unwrap();
                let rhs = apply_operator(&probe, &a, &map_relation(h, r).unwrap()).unwrap();
                if !lhs.is_subset_of(&rhs) {
                    expected += 1;
                }
            }
        }
        assert_eq!(report.violations.len(), expected);
        assert!(expected > 0);
    }
}
