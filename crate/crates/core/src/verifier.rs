//! Brute-force checks of the relational inclusions implied by a term that
//! is Mal'cev modulo `F` and `G`.
//!
//! Every clause is a list of inclusions between relational expressions in
//! admissible variables (`R`, `S`, `R1`, ..), arbitrary variables (`T`,
//! `T1`, `T2`) and the operators `F` and `G`. A check enumerates bindings,
//! evaluates both sides and records every pair of the left side missing
//! from the right side.
//!
//! Admissible variables range over every admissible relation when the
//! binding count stays within [`VerifyConfig::binding_limit`], otherwise
//! over a seeded sample. Arbitrary variables range over every relation on
//! carriers up to [`VerifyConfig::exhaustive_theta_max_carrier`], otherwise
//! over [`VerifyConfig::theta_samples`] seeded tuples per binding.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::admissible::{enumerate_admissible, AdmissibleRelation};
use crate::algebra::{Caps, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::expr::{eval_rel_expr, EvalContext, EvalMemo, RelExpr};
use crate::free::free_algebra;
use crate::hom::enumerate_homomorphisms;
use crate::malcev::{
    check_cond_vii, check_cond_x, find_term_cond_iv, soundness_family, verify_malcev_term,
    InclusionMode, MalcevWitness, Route,
};
use crate::operator::{
    apply_operator, check_hom_property, check_monotone, nested_pairs, triple_pointwise, HomReport,
    MonotoneReport, RelationOperator,
};
use crate::relation::BinaryRelation;
use crate::term::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClauseId {
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
    Vii,
    Viii,
    Ix,
    X,
    Xi,
    Xii,
    Xiii,
    Xiv,
}

const LABELS: [&str; 14] = [
    "i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x", "xi", "xii", "xiii", "xiv",
];

impl ClauseId {
    pub const ALL: [ClauseId; 14] = [
        ClauseId::I,
        ClauseId::Ii,
        ClauseId::Iii,
        ClauseId::Iv,
        ClauseId::V,
        ClauseId::Vi,
        ClauseId::Vii,
        ClauseId::Viii,
        ClauseId::Ix,
        ClauseId::X,
        ClauseId::Xi,
        ClauseId::Xii,
        ClauseId::Xiii,
        ClauseId::Xiv,
    ];

    pub fn label(self) -> &'static str {
        LABELS[self as usize]
    }

    pub fn parse(text: &str) -> Option<ClauseId> {
        LABELS.iter().position(|&l| l == text).map(|i| Self::ALL[i])
    }

    /// Parses `i,iii-v,xiv` style selections.
    pub fn parse_selection(text: &str) -> Result<Vec<ClauseId>> {
        let bad = |part: &str| Error::InvalidArgument(format!("unknown clause `{part}`"));
        let mut out = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some((lo, hi)) = part.split_once('-') {
                let lo = Self::parse(lo.trim()).ok_or_else(|| bad(part))?;
                let hi = Self::parse(hi.trim()).ok_or_else(|| bad(part))?;
                if lo > hi {
                    return Err(bad(part));
                }
                out.extend(Self::ALL[lo as usize..=hi as usize].iter().copied());
            } else {
                out.push(Self::parse(part).ok_or_else(|| bad(part))?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Values of the integer parameter: `n` for the indexed clauses, the
    /// chain length for the n-ary ones.
    pub fn params(self) -> Vec<Option<usize>> {
        match self {
            ClauseId::Iv | ClauseId::Vii => (0..=3).map(Some).collect(),
            ClauseId::Xii | ClauseId::Xiii | ClauseId::Xiv => (2..=4).map(Some).collect(),
            _ => vec![None],
        }
    }
}

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Left side of an inclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lhs {
    Expr(RelExpr),
    /// Pairs `(a, c)` with `a R b`, `b T1 c`, `a T2 d`, `d S c` and `b T d`
    /// for some `b, d`.
    Diagram,
}

impl fmt::Display for Lhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lhs::Expr(e) => e.fmt(f),
            Lhs::Diagram => f.write_str("{(a,c) | a R b T1 c, a T2 d S c, b T d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inclusion {
    pub lhs: Lhs,
    pub rhs: RelExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseSpec {
    pub id: ClauseId,
    pub param: Option<usize>,
    pub inclusions: Vec<Inclusion>,
    /// Variables ranging over admissible relations.
    pub admissible_vars: Vec<String>,
    /// Variables ranging over arbitrary relations.
    pub arbitrary_vars: Vec<String>,
}

fn parse(text: &str) -> RelExpr {
    RelExpr::parse(text).unwrap_or_else(|e| panic!("clause formula `{text}`: {e}"))
}

/// `A ⊆ B ⊆ C` as two inclusions.
fn chain(parts: &[String]) -> Vec<Inclusion> {
    parts
        .windows(2)
        .map(|w| Inclusion {
            lhs: Lhs::Expr(parse(&w[0])),
            rhs: parse(&w[1]),
        })
        .collect()
}

fn join(items: impl IntoIterator<Item = String>, sep: &str) -> String {
    items.into_iter().collect::<Vec<_>>().join(sep)
}

fn vars(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

impl ClauseSpec {
    /// The clause with its integer parameter fixed.
    pub fn new(id: ClauseId, param: Option<usize>) -> Result<ClauseSpec> {
        let needs = !matches!(id.params().as_slice(), [None]);
        if needs != param.is_some() {
            return Err(Error::InvalidArgument(format!(
                "clause {id} {} an integer parameter",
                if needs { "needs" } else { "takes no" }
            )));
        }
        let rs = || vec!["R".to_string(), "S".to_string()];
        let r = || vec!["R".to_string()];
        let s = |t: &str| t.to_string();
        let (inclusions, admissible, arbitrary) = match id {
            ClauseId::I => (
                vec![Inclusion {
                    lhs: Lhs::Diagram,
                    rhs: parse("F(R) o bar(T2 u T u T1) o G(S)"),
                }],
                rs(),
                vec![s("T"), s("T1"), s("T2")],
            ),
            ClauseId::Ii => (
                chain(&[s("R o T o S"), s("F(R) o bar((R o T) u (T o S)) o G(S)")]),
                rs(),
                vec![s("T")],
            ),
            ClauseId::Iii => (
                chain(&[
                    s("R o S"),
                    s("F(R) o bar(R u S) o G(S)"),
                    s("F(R) o S o R o G(S)"),
                ]),
                rs(),
                vec![],
            ),
            ClauseId::Iv => {
                let n = param.expect("checked");
                let tail = if n.is_multiple_of(2) { "S" } else { "R" };
                (
                    chain(&[
                        format!("alt(R, S, {})", n + 2),
                        format!(
                            "F(R) o bar(F(R) u F(S))^{n} o bar(R u S) o bar(G(R) u G(S))^{n} o G({tail})"
                        ),
                    ]),
                    rs(),
                    vec![],
                )
            }
            ClauseId::V => (
                chain(&[
                    s("R + S"),
                    s("(F(R) + F(S)) o bar(R u S) o (G(R) + G(S))"),
                    s("(F(R) + F(S)) o R o S o (G(R) + G(S))"),
                ]),
                rs(),
                vec![],
            ),
            ClauseId::Vi => (chain(&[s("R o R"), s("F(R) o R o G(R)")]), r(), vec![]),
            ClauseId::Vii => {
                let n = param.expect("checked");
                (
                    chain(&[format!("R^{}", n + 1), format!("F(R)^{n} o R o G(R)^{n}")]),
                    r(),
                    vec![],
                )
            }
            ClauseId::Viii => (
                chain(&[s("tc(R)"), s("tc(F(R)) o R o tc(G(R))")]),
                r(),
                vec![],
            ),
            ClauseId::Ix => {
                let mut inc = chain(&[s("conv(R)"), s("F(conv(R)) o R o G(conv(R))")]);
                inc.extend(chain(&[s("R"), s("F(R) o conv(R) o G(R)")]));
                (inc, r(), vec![])
            }
            ClauseId::X => (
                chain(&[
                    s("R + conv(S)"),
                    s("(F(R) + F(conv(S))) o bar(R u S) o (G(R) + G(conv(S)))"),
                    s("(F(R) + F(conv(S))) o R o S o (G(R) + G(conv(S)))"),
                ]),
                rs(),
                vec![],
            ),
            ClauseId::Xi => (
                chain(&[
                    s("cg(R)"),
                    s("(F(R) + F(conv(R))) o R o (G(R) + G(conv(R)))"),
                ]),
                r(),
                vec![],
            ),
            ClauseId::Xii => {
                let n = param.expect("checked");
                if n < 2 {
                    return Err(Error::InvalidArgument(
                        "chains need length at least 2".into(),
                    ));
                }
                let rv = vars("R", n);
                let mut factors = vec![format!("F({})", rv[0])];
                for k in 2..n {
                    factors.push(format!(
                        "bar({})",
                        join(rv[..k].iter().map(|v| format!("F({v})")), " u ")
                    ));
                }
                factors.push(format!("bar({})", join(rv.iter().cloned(), " u ")));
                for k in 2..n {
                    factors.push(format!(
                        "bar({})",
                        join(rv[k - 1..].iter().map(|v| format!("G({v})")), " u ")
                    ));
                }
                factors.push(format!("G({})", rv[n - 1]));
                (
                    chain(&[join(rv.iter().cloned(), " o "), join(factors, " o ")]),
                    rv,
                    vec![],
                )
            }
            ClauseId::Xiii => {
                let n = param.expect("checked");
                if n < 2 {
                    return Err(Error::InvalidArgument(
                        "chains need length at least 2".into(),
                    ));
                }
                let rv = vars("R", n);
                let sum = |op: &str| join(rv.iter().map(|v| format!("{op}({v})")), " + ");
                (
                    chain(&[
                        join(rv.iter().cloned(), " + "),
                        format!(
                            "({}) o bar({}) o ({})",
                            sum("F"),
                            join(rv.iter().cloned(), " u "),
                            sum("G")
                        ),
                    ]),
                    rv,
                    vec![],
                )
            }
            ClauseId::Xiv => {
                let n = param.expect("checked");
                if n < 2 {
                    return Err(Error::InvalidArgument(
                        "chains need length at least 2".into(),
                    ));
                }
                let rv = vars("R", n);
                let sum = |op: &str| {
                    join(
                        rv.iter().map(|v| format!("{op}({v}) + {op}(conv({v}))")),
                        " + ",
                    )
                };
                let all = join(rv.iter().cloned(), " u ");
                (
                    chain(&[
                        format!("cg({all})"),
                        format!("({}) o bar({all}) o ({})", sum("F"), sum("G")),
                    ]),
                    rv,
                    vec![],
                )
            }
        };
        let spec = ClauseSpec {
            id,
            param,
            inclusions,
            admissible_vars: admissible,
            arbitrary_vars: arbitrary,
        };
        spec.check_coverage()?;
        Ok(spec)
    }

    /// All parameter instances of a clause.
    pub fn instances(id: ClauseId) -> Vec<ClauseSpec> {
        id.params()
            .into_iter()
            .map(|p| ClauseSpec::new(id, p).expect("built-in clause"))
            .collect()
    }

    pub fn label(&self) -> String {
        match (self.id, self.param) {
            (ClauseId::Xii | ClauseId::Xiii | ClauseId::Xiv, Some(n)) => {
                format!("{}[len={n}]", self.id)
            }
            (id, Some(n)) => format!("{id}[n={n}]"),
            (id, None) => id.to_string(),
        }
    }

    fn check_coverage(&self) -> Result<()> {
        let mut used = Vec::new();
        for inc in &self.inclusions {
            match &inc.lhs {
                Lhs::Expr(e) => used.extend(e.variables()),
                Lhs::Diagram => used.extend(["R", "S", "T", "T1", "T2"].map(String::from)),
            }
            used.extend(inc.rhs.variables());
        }
        for v in used {
            if !self.admissible_vars.contains(&v) && !self.arbitrary_vars.contains(&v) {
                return Err(Error::UnboundName(v));
            }
        }
        Ok(())
    }
}

/// Tunables for clause checks. Defaults keep a sweep over small algebras
/// fast while staying exhaustive on 2- and 3-element carriers.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Maximum relation-expression evaluations per clause instance.
    pub budget: u64,
    pub seed: u64,
    /// Seeded tuples of arbitrary relations per admissible binding.
    pub theta_samples: usize,
    /// Carriers up to this size get every tuple of arbitrary relations.
    pub exhaustive_theta_max_carrier: usize,
    /// Admissible bindings beyond this count are sampled.
    pub binding_limit: usize,
    /// Cap on the admissible-relation enumeration.
    pub admissible_cap: usize,
    /// Violations kept per report (all are counted).
    pub max_reported: usize,
    pub caps: Caps,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            budget: 1_000_000,
            seed: 0,
            theta_samples: 200,
            exhaustive_theta_max_carrier: 2,
            binding_limit: 4096,
            admissible_cap: 4096,
            max_reported: 10,
            caps: Caps::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => f.write_str("pass"),
            Status::Fail => f.write_str("fail"),
            Status::Skipped(reason) => write!(f, "skipped ({reason})"),
        }
    }
}

/// Whether a failure is a bug (the precondition holds) or informative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Asserted,
    Exploratory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub bindings: Vec<(String, BinaryRelation)>,
    /// Index of the failing inclusion within the clause.
    pub inclusion: usize,
    /// A pair of the left side missing from the right side.
    pub pair: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub clause: String,
    pub algebra: String,
    pub f: String,
    pub g: String,
    pub mode: Mode,
    pub exhaustive: bool,
    pub instances: u64,
    pub evaluations: u64,
    pub violation_count: u64,
    /// The first few violations in binding order.
    pub violations: Vec<Violation>,
    #[serde(flatten)]
    pub status: Status,
}

/// Precomputed state for checking clauses on one algebra and operator pair.
pub struct ClauseChecker {
    alg: FiniteAlgebra,
    f: RelationOperator,
    g: RelationOperator,
    config: VerifyConfig,
    relations: Vec<BinaryRelation>,
    relations_complete: bool,
    witness: Option<Term>,
}

impl ClauseChecker {
    pub fn new(
        alg: &FiniteAlgebra,
        f: &RelationOperator,
        g: &RelationOperator,
        config: &VerifyConfig,
    ) -> Result<ClauseChecker> {
        let adm = enumerate_admissible(alg, config.admissible_cap)?;
        let witness = precondition_witness(alg, f, g, &config.caps)?;
        Ok(ClauseChecker {
            alg: alg.clone(),
            f: f.clone(),
            g: g.clone(),
            config: config.clone(),
            relations: adm
                .relations
                .into_iter()
                .map(AdmissibleRelation::into_relation)
                .collect(),
            relations_complete: adm.complete,
            witness,
        })
    }

    /// A term Mal'cev modulo `F, G` on the algebra, if one exists.
    pub fn witness(&self) -> Option<&Term> {
        self.witness.as_ref()
    }

    pub fn mode(&self) -> Mode {
        if self.witness.is_some() {
            Mode::Asserted
        } else {
            Mode::Exploratory
        }
    }

    pub fn admissible_relations(&self) -> &[BinaryRelation] {
        &self.relations
    }

    fn admissible_bindings(&self, k: usize) -> (Vec<Vec<usize>>, bool) {
        let m = self.relations.len();
        let total = (m as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        let decode = |mut idx: u128| {
            let mut out = vec![0usize; k];
            for slot in (0..k).rev() {
                out[slot] = (idx % m as u128) as usize;
                idx /= m as u128;
            }
            out
        };
        if total <= self.config.binding_limit as u128 {
            return ((0..total).map(decode).collect(), self.relations_complete);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let picks: Vec<u128> = if total <= usize::MAX as u128 {
            let mut p: Vec<u128> = sample(&mut rng, total as usize, self.config.binding_limit)
                .into_iter()
                .map(|i| i as u128)
                .collect();
            p.sort_unstable();
            p
        } else {
            (0..self.config.binding_limit)
                .map(|_| rng.gen_range(0..total))
                .collect()
        };
        (picks.into_iter().map(decode).collect(), false)
    }

    fn theta_plan(&self, j: usize) -> ThetaPlan {
        let n = self.alg.size();
        if j == 0 {
            return ThetaPlan::None;
        }
        if n <= self.config.exhaustive_theta_max_carrier {
            let per = 1usize << (n * n);
            ThetaPlan::Exhaustive {
                count: per.pow(j as u32),
                per,
            }
        } else {
            ThetaPlan::Sampled(self.config.theta_samples)
        }
    }

    pub fn check(&self, spec: &ClauseSpec) -> Result<VerificationReport> {
        let n = self.alg.size();
        let (bindings, adm_exhaustive) = self.admissible_bindings(spec.admissible_vars.len());
        let theta = self.theta_plan(spec.arbitrary_vars.len());
        let per_binding = theta.count() as u64;
        let evals_per_instance = 2 * spec.inclusions.len() as u64;
        let per_binding_evals = per_binding * evals_per_instance;
        let affordable = (self.config.budget / per_binding_evals.max(1)) as usize;
        let planned = bindings.len();
        let run = planned.min(affordable);

        let ops: HashMap<String, RelationOperator> = [
            ("F".to_string(), self.f.clone()),
            ("G".to_string(), self.g.clone()),
        ]
        .into();
        let seed = self.config.seed;
        let results: Vec<Result<Vec<Violation>>> = bindings[..run]
            .par_iter()
            .enumerate()
            .map_init(
                || RefCell::new(EvalMemo::new()),
                |memo, (bi, binding)| {
                    if memo.borrow().len() > 200_000 {
                        memo.borrow_mut().clear();
                    }
                    let mut env: HashMap<String, BinaryRelation> = spec
                        .admissible_vars
                        .iter()
                        .zip(binding)
                        .map(|(v, &ri)| (v.clone(), self.relations[ri].clone()))
                        .collect();
                    let mut rng = ChaCha8Rng::seed_from_u64(
                        seed ^ (bi as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                    );
                    let mut found = Vec::new();
                    for ti in 0..per_binding {
                        for (slot, v) in spec.arbitrary_vars.iter().enumerate() {
                            let rel = theta.relation(n, ti as usize, slot, &mut rng);
                            env.insert(v.clone(), rel);
                        }
                        let ctx = EvalContext {
                            strict: true,
                            memo: Some(memo),
                            ..EvalContext::new(&self.alg, &env, &ops)
                        };
                        for (ii, inc) in spec.inclusions.iter().enumerate() {
                            let lhs = match &inc.lhs {
                                Lhs::Expr(e) => eval_rel_expr(e, &ctx)?.relation,
                                Lhs::Diagram => diagram(&env),
                            };
                            let rhs = eval_rel_expr(&inc.rhs, &ctx)?.relation;
                            if let Some(pair) = lhs.first_missing_from(&rhs) {
                                let mut bound: Vec<(String, BinaryRelation)> =
                                    env.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
                                bound.sort_by(|a, b| a.0.cmp(&b.0));
                                found.push(Violation {
                                    bindings: bound,
                                    inclusion: ii,
                                    pair,
                                });
                            }
                        }
                    }
                    Ok(found)
                },
            )
            .collect();

        let mut violations = Vec::new();
        let mut violation_count = 0u64;
        for r in results {
            for v in r? {
                violation_count += 1;
                if violations.len() < self.config.max_reported {
                    violations.push(v);
                }
            }
        }
        let status = if violation_count > 0 {
            Status::Fail
        } else if run < planned {
            Status::Skipped(format!(
                "budget of {} evaluations exhausted after {run} of {planned} bindings",
                self.config.budget
            ))
        } else {
            Status::Pass
        };
        Ok(VerificationReport {
            clause: spec.label(),
            algebra: self.alg.name().to_string(),
            f: self.f.name.clone(),
            g: self.g.name.clone(),
            mode: self.mode(),
            exhaustive: adm_exhaustive && theta.is_exhaustive() && run == planned,
            instances: run as u64 * per_binding,
            evaluations: run as u64 * per_binding_evals,
            violation_count,
            violations,
            status,
        })
    }

    /// Every parameter instance of every selected clause.
    pub fn check_all(&self, clauses: &[ClauseId]) -> Result<Vec<VerificationReport>> {
        let mut out = Vec::new();
        for &id in clauses {
            for spec in ClauseSpec::instances(id) {
                out.push(self.check(&spec)?);
            }
        }
        Ok(out)
    }
}

/// One-shot clause check; see [`ClauseChecker`].
pub fn check_clause(
    alg: &FiniteAlgebra,
    spec: &ClauseSpec,
    f: &RelationOperator,
    g: &RelationOperator,
    config: &VerifyConfig,
) -> Result<VerificationReport> {
    ClauseChecker::new(alg, f, g, config)?.check(spec)
}

enum ThetaPlan {
    None,
    Exhaustive { count: usize, per: usize },
    Sampled(usize),
}

impl ThetaPlan {
    fn count(&self) -> usize {
        match self {
            ThetaPlan::None => 1,
            ThetaPlan::Exhaustive { count, .. } => *count,
            ThetaPlan::Sampled(k) => *k,
        }
    }

    fn is_exhaustive(&self) -> bool {
        !matches!(self, ThetaPlan::Sampled(_))
    }

    /// The relation for `slot` in tuple `index`. Sampled plans draw from
    /// `rng` in slot order, so callers must request slots in order.
    fn relation(
        &self,
        n: usize,
        index: usize,
        slot: usize,
        rng: &mut ChaCha8Rng,
    ) -> BinaryRelation {
        let mut rel = BinaryRelation::empty(n);
        match self {
            ThetaPlan::None => {}
            ThetaPlan::Exhaustive { per, .. } => {
                let mut code = index;
                for _ in 0..slot {
                    code /= per;
                }
                code %= per;
                for bit in 0..n * n {
                    if code & (1 << bit) != 0 {
                        rel.insert(bit / n, bit % n);
                    }
                }
            }
            ThetaPlan::Sampled(_) => {
                for a in 0..n {
                    for b in 0..n {
                        if rng.gen::<bool>() {
                            rel.insert(a, b);
                        }
                    }
                }
            }
        }
        rel
    }
}

/// Pairs `(a, c)` completing the diagram `a R b T1 c`, `a T2 d S c`, `b T d`.
fn diagram(env: &HashMap<String, BinaryRelation>) -> BinaryRelation {
    let get = |k: &str| &env[k];
    let (r, s, t, t1, t2) = (get("R"), get("S"), get("T"), get("T1"), get("T2"));
    let n = r.carrier_size();
    let mut out = BinaryRelation::empty(n);
    for a in 0..n {
        for b in r.successors(a) {
            for d in t.successors(b) {
                if !t2.contains(a, d) {
                    continue;
                }
                for c in t1.successors(b) {
                    if s.contains(d, c) {
                        out.insert(a, c);
                    }
                }
            }
        }
    }
    out
}

/// A term that is Mal'cev modulo `F, G` on `alg` itself.
///
/// Tries the free-algebra search first (its witness works on the whole
/// variety) and falls back to scanning every ternary term operation, since
/// the inclusions only need a term for `alg`.
pub fn precondition_witness(
    alg: &FiniteAlgebra,
    f: &RelationOperator,
    g: &RelationOperator,
    caps: &Caps,
) -> Result<Option<Term>> {
    let rels = enumerate_admissible(alg, usize::MAX)?.relations;
    let images: Vec<(BinaryRelation, BinaryRelation)> = rels
        .iter()
        .map(|r| {
            Ok((
                apply_operator(f, alg, r)?.into_relation(),
                apply_operator(g, alg, r)?.into_relation(),
            ))
        })
        .collect::<Result<_>>()?;
    let n = alg.size();
    let holds = |table: &dyn Fn(usize, usize, usize) -> usize| {
        rels.iter().zip(&images).all(|(r, (fr, gr))| {
            r.pairs()
                .all(|(a, b)| fr.contains(a, table(a, b, b)) && gr.contains(table(a, a, b), b))
        })
    };
    if let Some(w) = find_term_cond_iv(alg, f, g, caps)? {
        let table = w.term.operation_table(alg, 3)?;
        if holds(&|a, b, c| table[(a * n + b) * n + c]) {
            return Ok(Some(w.term));
        }
    }
    let free = free_algebra(alg, 3, caps)?;
    for i in 0..free.len() {
        let tuple = &free.elements()[i];
        if holds(&|a, b, c| tuple[(a * n + b) * n + c] as usize) {
            return Ok(Some(free.witness(i)));
        }
    }
    Ok(None)
}

/// Outcome of comparing searches for `(F, G)` and `(F', G')`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TripleReport {
    pub algebra: String,
    pub f: String,
    pub g: String,
    pub base: Option<MalcevWitness>,
    pub derived_f: String,
    pub derived_g: String,
    pub derived: Option<MalcevWitness>,
    #[serde(flatten)]
    pub status: Status,
}

/// If a witness exists for `(F, G)`, one must exist for the pointwise
/// triples of the squared operators.
pub fn check_squared_triple(
    alg: &FiniteAlgebra,
    f: &RelationOperator,
    g: &RelationOperator,
    caps: &Caps,
) -> Result<TripleReport> {
    let base = find_term_cond_iv(alg, f, g, caps)?;
    let f2 = triple_pointwise(f);
    let g2 = triple_pointwise(g);
    let derived = if base.is_some() {
        find_term_cond_iv(alg, &f2, &g2, caps)?
    } else {
        None
    };
    let status = match (&base, &derived) {
        (Some(_), None) => Status::Fail,
        _ => Status::Pass,
    };
    Ok(TripleReport {
        algebra: alg.name().to_string(),
        f: f.name.clone(),
        g: g.name.clone(),
        base,
        derived_f: f2.name,
        derived_g: g2.name,
        derived,
        status,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RouteAnswer {
    pub route: Route,
    pub witness: Option<MalcevWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub algebra: String,
    pub f: String,
    pub g: String,
    pub answers: Vec<RouteAnswer>,
    pub agree: bool,
    /// Monotone on every nested pair of admissible relations.
    pub monotone: bool,
    /// Homomorphism property across `alg`, its subalgebras and `alg²`.
    pub hom_property: bool,
    /// `verify_malcev_term` outcome per route witness (when found).
    pub witnesses_verified: Vec<bool>,
    /// Clause reports asserting the single-relation consequences.
    pub consequences: Vec<VerificationReport>,
    #[serde(flatten)]
    pub status: Status,
}

/// Runs the three decision procedures, checks they agree, verifies each
/// witness on `alg`, its subalgebras and `alg²`, and checks the
/// single-relation consequences. Operators failing monotonicity or the
/// homomorphism property are flagged; agreement is then not guaranteed and
/// disagreement does not fail the report.
pub fn check_equivalence_suite(
    alg: &FiniteAlgebra,
    f: &RelationOperator,
    g: &RelationOperator,
    config: &VerifyConfig,
) -> Result<EquivalenceReport> {
    let caps = &config.caps;
    let answers = vec![
        RouteAnswer {
            route: Route::Iv,
            witness: find_term_cond_iv(alg, f, g, caps)?,
        },
        RouteAnswer {
            route: Route::Vii,
            witness: check_cond_vii(alg, f, g, InclusionMode::SinglePair, caps)?,
        },
        RouteAnswer {
            route: Route::X,
            witness: check_cond_x(alg, f, g, InclusionMode::SinglePair, caps)?,
        },
    ];
    let yes = answers[0].witness.is_some();
    let agree = answers.iter().all(|a| a.witness.is_some() == yes);

    let props = [
        operator_properties(alg, f, caps)?,
        operator_properties(alg, g, caps)?,
    ];
    let monotone = props.iter().all(OperatorProperties::monotone_passed);
    let hom_property = props.iter().all(|p| p.hom_property.passed());

    let mut witnesses_verified = Vec::new();
    let mut consequences = Vec::new();
    if yes {
        let (family, rels) = soundness_family(alg, caps)?;
        for a in &answers {
            if let Some(w) = &a.witness {
                witnesses_verified
                    .push(verify_malcev_term(&family, &w.term, f, g, &rels)?.passed());
            }
        }
        let checker = ClauseChecker::new(alg, f, g, config)?;
        for id in [ClauseId::Vi, ClauseId::Ix] {
            consequences.extend(checker.check_all(&[id])?);
        }
    }
    let well_behaved = monotone && hom_property;
    let failed = (well_behaved && !agree)
        || witnesses_verified.iter().any(|ok| !ok)
        || consequences.iter().any(|r| r.status == Status::Fail);
    Ok(EquivalenceReport {
        algebra: alg.name().to_string(),
        f: f.name.clone(),
        g: g.name.clone(),
        answers,
        agree,
        monotone,
        hom_property,
        witnesses_verified,
        consequences,
        status: if failed { Status::Fail } else { Status::Pass },
    })
}

/// Monotonicity and homomorphism-property flags for a set of operators,
/// checked on `alg`, its subalgebras and `alg²`.
/// Monotonicity and homomorphism-property evidence for one operator,
/// gathered on an algebra, its proper subalgebras and its square.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperatorProperties {
    pub operator: String,
    pub algebra: String,
    /// Names of the algebras the operator was exercised on.
    pub family: Vec<String>,
    pub monotone: Vec<MonotoneReport>,
    pub hom_property: HomReport,
}

impl OperatorProperties {
    pub fn monotone_passed(&self) -> bool {
        self.monotone.iter().all(MonotoneReport::passed)
    }

    pub fn passed(&self) -> bool {
        self.monotone_passed() && self.hom_property.passed()
    }
}

pub fn operator_properties(
    alg: &FiniteAlgebra,
    op: &RelationOperator,
    caps: &Caps,
) -> Result<OperatorProperties> {
    use std::sync::Arc;
    let (family, relations) = soundness_family(alg, caps)?;
    let algebras: Vec<Arc<FiniteAlgebra>> = family.into_iter().map(Arc::new).collect();
    let mut samples = HashMap::new();
    for (a, rels) in algebras.iter().zip(relations) {
        samples.insert(a.name().to_string(), rels);
    }
    let mut homs = Vec::new();
    for s in &algebras {
        for t in &algebras {
            homs.extend(enumerate_homomorphisms(s, t, 1_000_000)?.homs);
        }
    }
    let monotone = algebras
        .iter()
        .map(|a| check_monotone(op, a, &nested_pairs(&samples[a.name()])))
        .collect::<Result<Vec<_>>>()?;
    Ok(OperatorProperties {
        operator: op.name.clone(),
        algebra: alg.name().to_string(),
        family: algebras.iter().map(|a| a.name().to_string()).collect(),
        monotone,
        hom_property: check_hom_property(op, &homs, &samples)?,
    })
}
