//! Finite universal algebra workbench.
//!
//! The crate covers finite algebras and their free algebras, a bit-matrix
//! relational calculus (compositions, sums, compatible, tolerance,
//! transitive and congruence closures), pluggable operators on reflexive
//! compatible relations, the search for ternary terms that are Mal'cev
//! modulo a pair of such operators, and brute-force checkers for the
//! relational inclusions such a term implies.

pub mod admissible;
pub mod algebra;
pub mod closure;
pub mod corpus;
pub mod error;
pub mod expr;
pub mod free;
pub mod hom;
pub mod malcev;
pub mod operator;
pub mod relation;
pub mod term;
pub mod verifier;

pub use admissible::{
    admissible_closure, compatible_closure, congruence_closure, enumerate_admissible,
    generated_admissible, is_admissible, is_compatible, tolerance_closure, AdmissibleRelation,
    AdmissibleSet,
};
pub use algebra::{Caps, FiniteAlgebra, Operation};
pub use closure::{generate_subalgebra, subuniverses, Subalgebra};
pub use error::{Error, Result};
pub use expr::{eval_rel_expr, EvalContext, EvalMemo, Evaluated, RelExpr};
pub use free::{free_algebra, FreeAlgebraRepr};
pub use hom::{enumerate_homomorphisms, map_relation, HomEnumeration, Homomorphism};
pub use malcev::{
    check_cond_vii, check_cond_x, find_term, find_term_cond_iv, principal_free_relation,
    soundness_family, test_relations, verify_malcev_term, InclusionMode, MalcevReport,
    MalcevWitness, Route,
};
pub use operator::{
    apply_operator, check_hom_property, check_monotone, nested_pairs, square_operator,
    triple_pointwise, HomReport, MonotoneReport, OperatorKind, RelationOperator,
};
pub use relation::BinaryRelation;
pub use term::{Assignment, Term};
pub use verifier::{
    check_clause, check_equivalence_suite, check_squared_triple, operator_properties,
    precondition_witness, ClauseChecker, ClauseId, ClauseSpec, EquivalenceReport, Inclusion, Lhs,
    Mode, OperatorProperties, Status, TripleReport, VerificationReport, VerifyConfig, Violation,
};
