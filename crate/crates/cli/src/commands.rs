//! The five subcommands. Each returns a text rendering, a structured
//! result and an exit code; `main` decides which rendering to print.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use malrel_core::{
    check_cond_vii, check_cond_x, check_equivalence_suite, check_squared_triple, eval_rel_expr,
    find_term, free_algebra, operator_properties, soundness_family, verify_malcev_term, Caps,
    ClauseChecker, ClauseId, EvalContext, FiniteAlgebra, InclusionMode, MalcevWitness, Mode,
    RelExpr, RelationOperator, Route, Status, VerifyConfig,
};
use serde_json::{json, Value};

use crate::input::{
    load_algebra, load_corpus, parse_binding, parse_relation, CliError, CliResult, EXIT_NOT_FOUND,
    EXIT_OK,
};

/// Settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    pub budget: u64,
    pub samples: usize,
    pub strict: bool,
    pub caps: Caps,
    pub corpus: Option<PathBuf>,
}

impl Settings {
    fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            budget: self.budget,
            seed: self.seed,
            theta_samples: self.samples,
            caps: self.caps,
            ..VerifyConfig::default()
        }
    }

    fn algebra(&self, arg: &str) -> CliResult<FiniteAlgebra> {
        load_algebra(arg, self.corpus.as_deref(), &self.caps)
    }
}

pub struct Outcome {
    pub code: u8,
    pub text: String,
    pub result: Value,
}

fn operator(spec: &str) -> CliResult<RelationOperator> {
    RelationOperator::parse(spec).map_err(|e| CliError::usage(format!("operator `{spec}`: {e}")))
}

fn header(alg: &FiniteAlgebra) -> String {
    let ops: Vec<String> = alg
        .operations()
        .iter()
        .map(|o| format!("{}/{}", o.name, o.arity))
        .collect();
    format!(
        "algebra {} ({} elements; operations: {})\n",
        alg.name(),
        alg.size(),
        if ops.is_empty() {
            "none".into()
        } else {
            ops.join(", ")
        }
    )
}

pub struct ClosureArgs<'a> {
    pub algebra: &'a str,
    pub rel: &'a str,
    pub bindings: &'a [String],
    pub expr: &'a str,
    pub f: Option<&'a str>,
    pub g: Option<&'a str>,
}

pub fn closure(settings: &Settings, args: &ClosureArgs) -> CliResult<Outcome> {
    let alg = settings.algebra(args.algebra)?;
    let mut env = HashMap::new();
    env.insert("R".to_string(), parse_relation(args.rel, &alg)?);
    for b in args.bindings {
        let (name, rel) = parse_binding(b, &alg)?;
        env.insert(name, rel);
    }
    let mut ops = HashMap::new();
    for (name, spec) in [("F", args.f), ("G", args.g)] {
        if let Some(spec) = spec {
            ops.insert(name.to_string(), operator(spec)?);
        }
    }
    let expr = RelExpr::parse(args.expr)
        .map_err(|e| CliError::usage(format!("expression `{}`: {e}", args.expr)))?;
    let mut ctx = EvalContext::new(&alg, &env, &ops);
    ctx.strict = settings.strict;
    let out = eval_rel_expr(&expr, &ctx)?;
    let rel = &out.relation;

    let mut text = header(&alg);
    let mut names: Vec<&String> = env.keys().collect();
    names.sort();
    for name in names {
        writeln!(text, "{name} = {}", env[name]).unwrap();
    }
    writeln!(text, "expression: {expr}").unwrap();
    writeln!(text, "pairs ({}): {rel}", rel.len()).unwrap();
    text.push_str("matrix:\n");
    for line in rel.to_matrix_string().lines() {
        writeln!(text, "  {line}").unwrap();
    }
    writeln!(
        text,
        "reflexive: {}  symmetric: {}  transitive: {}",
        rel.is_reflexive(),
        rel.is_symmetric(),
        rel.is_transitive()
    )
    .unwrap();
    for c in &out.coercions {
        writeln!(text, "coerced: {c}").unwrap();
    }

    let bindings: serde_json::Map<String, Value> =
        env.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    Ok(Outcome {
        code: EXIT_OK,
        text,
        result: json!({
            "algebra": alg.name(),
            "bindings": bindings,
            "expression": expr.to_string(),
            "relation": rel,
            "size": rel.len(),
            "reflexive": rel.is_reflexive(),
            "symmetric": rel.is_symmetric(),
            "transitive": rel.is_transitive(),
            "coercions": out.coercions,
        }),
    })
}

fn witness_text(w: &MalcevWitness, text: &mut String) {
    let xyz = ["x", "y", "z"];
    let slots = ["v1", "v2", "v3", "v4", "v5"];
    writeln!(text, "term: t(x,y,z) = {}", w.term.to_prefix(&xyz)).unwrap();
    writeln!(text, "membership witness: u = {}", w.u.to_prefix(&slots)).unwrap();
    let (l1, l2) = match w.route {
        Route::Vii => ("left element u(x,y,x,y,z)", "right element u(y,z,x,y,z)"),
        _ => ("t(x,y,y)", "t(x,x,y)"),
    };
    if let Some(t) = &w.t1 {
        writeln!(text, "{l1} = {}", t.to_prefix(&xyz)).unwrap();
    }
    if let Some(t) = &w.t2 {
        writeln!(text, "{l2} = {}", t.to_prefix(&xyz)).unwrap();
    }
    if let Some(t) = &w.t_prime {
        writeln!(text, "t'(v1..v5) = {}", t.to_prefix(&slots)).unwrap();
    }
}

pub struct SearchArgs<'a> {
    pub algebra: &'a str,
    pub f: &'a str,
    pub g: &'a str,
    pub route: Route,
    pub full: bool,
}

pub fn search(settings: &Settings, args: &SearchArgs) -> CliResult<Outcome> {
    let alg = settings.algebra(args.algebra)?;
    let (f, g) = (operator(args.f)?, operator(args.g)?);
    let caps = &settings.caps;
    let mode = if args.full {
        InclusionMode::Full
    } else {
        InclusionMode::SinglePair
    };
    let witness = match (args.route, mode) {
        (Route::Iv, InclusionMode::Full) => {
            return Err(CliError::usage("--full applies to routes vii and x only"))
        }
        (Route::Vii, _) => check_cond_vii(&alg, &f, &g, mode, caps)?,
        (Route::X, _) => check_cond_x(&alg, &f, &g, mode, caps)?,
        (Route::Iv, _) => find_term(&alg, &f, &g, Route::Iv, caps)?,
    };

    let mut text = header(&alg);
    writeln!(
        text,
        "F = {}  G = {}  route {}",
        f.name,
        g.name,
        args.route.label()
    )
    .unwrap();
    let Some(w) = witness else {
        text.push_str("none\n");
        return Ok(Outcome {
            code: EXIT_NOT_FOUND,
            text,
            result: json!({
                "algebra": alg.name(),
                "f": f.name,
                "g": g.name,
                "route": args.route,
                "full": args.full,
                "found": false,
                "witness": null,
            }),
        });
    };
    witness_text(&w, &mut text);
    let (family, rels) = soundness_family(&alg, caps)?;
    let check = verify_malcev_term(&family, &w.term, &f, &g, &rels)?;
    writeln!(
        text,
        "checked on {} algebras, {} relations, {} pairs: {}",
        check.algebras,
        check.relations,
        check.pairs,
        if check.passed() { "pass" } else { "FAIL" }
    )
    .unwrap();
    for v in check.violations.iter().take(5) {
        writeln!(text, "  violation: {v:?}").unwrap();
    }
    Ok(Outcome {
        code: EXIT_OK,
        text,
        result: json!({
            "algebra": alg.name(),
            "f": f.name,
            "g": g.name,
            "route": args.route,
            "full": args.full,
            "found": true,
            "witness": w,
            "check": check,
        }),
    })
}

pub struct VerifyArgs<'a> {
    pub algebra: &'a str,
    pub f: &'a str,
    pub g: &'a str,
    pub clauses: &'a str,
    pub routes: bool,
    pub squared: bool,
}

pub fn verify(settings: &Settings, args: &VerifyArgs) -> CliResult<Outcome> {
    let alg = settings.algebra(args.algebra)?;
    let (f, g) = (operator(args.f)?, operator(args.g)?);
    let config = settings.verify_config();
    let ids = ClauseId::parse_selection(args.clauses)?;
    if ids.is_empty() && !args.routes && !args.squared {
        return Err(CliError::usage("no clauses selected"));
    }
    let checker = ClauseChecker::new(&alg, &f, &g, &config)?;
    let mode = checker.mode();
    let reports = checker.check_all(&ids)?;

    let mut text = header(&alg);
    writeln!(
        text,
        "F = {}  G = {}  seed {}",
        f.name, g.name, settings.seed
    )
    .unwrap();
    match checker.witness() {
        Some(t) => writeln!(
            text,
            "mode: asserted (witness {})",
            t.to_prefix(&["x", "y", "z"])
        ),
        None => writeln!(
            text,
            "mode: exploratory (no term is Mal'cev modulo F, G here)"
        ),
    }
    .unwrap();
    let mut failed = false;
    if !reports.is_empty() {
        writeln!(
            text,
            "{:<12} {:<8} {:>10} {:>12} {:>10}  coverage",
            "clause", "status", "instances", "evaluations", "violations"
        )
        .unwrap();
    }
    for r in &reports {
        failed |= r.status == Status::Fail;
        let status = match &r.status {
            Status::Skipped(_) => "skipped".to_string(),
            s => s.to_string(),
        };
        writeln!(
            text,
            "{:<12} {:<8} {:>10} {:>12} {:>10}  {}",
            r.clause,
            status,
            r.instances,
            r.evaluations,
            r.violation_count,
            if r.exhaustive {
                "exhaustive"
            } else {
                "sampled"
            }
        )
        .unwrap();
        if let Status::Skipped(reason) = &r.status {
            writeln!(text, "  skipped: {reason}").unwrap();
        }
        for v in r.violations.iter().take(3) {
            let binds: Vec<String> = v
                .bindings
                .iter()
                .map(|(k, rel)| format!("{k}={rel}"))
                .collect();
            writeln!(
                text,
                "  violation: inclusion {} misses ({},{}) with {}",
                v.inclusion,
                v.pair.0,
                v.pair.1,
                binds.join(" ")
            )
            .unwrap();
        }
    }

    let mut result = json!({
        "algebra": alg.name(),
        "f": f.name,
        "g": g.name,
        "mode": mode,
        "witness": checker.witness().map(|t| t.to_prefix(&["x", "y", "z"])),
        "clauses": reports,
    });
    if args.routes {
        let eq = check_equivalence_suite(&alg, &f, &g, &config)?;
        failed |= eq.status == Status::Fail;
        let found: Vec<String> = eq
            .answers
            .iter()
            .map(|a| {
                format!(
                    "{}={}",
                    a.route.label(),
                    if a.witness.is_some() { "yes" } else { "no" }
                )
            })
            .collect();
        writeln!(
            text,
            "routes: {}  agree: {}  monotone: {}  hom property: {}  -> {}",
            found.join(" "),
            eq.agree,
            eq.monotone,
            eq.hom_property,
            eq.status
        )
        .unwrap();
        result["routes"] = json!(eq);
    }
    if args.squared {
        let tr = check_squared_triple(&alg, &f, &g, &settings.caps)?;
        failed |= tr.status == Status::Fail;
        writeln!(
            text,
            "squared triple: base {} / {} = {}  derived {} / {} = {}  -> {}",
            tr.f,
            tr.g,
            if tr.base.is_some() { "found" } else { "none" },
            tr.derived_f,
            tr.derived_g,
            if tr.derived.is_some() {
                "found"
            } else {
                "none"
            },
            tr.status
        )
        .unwrap();
        result["squared"] = json!(tr);
    }
    // Exploratory runs report but never assert.
    let code = if failed && mode == Mode::Asserted {
        EXIT_NOT_FOUND
    } else {
        EXIT_OK
    };
    writeln!(
        text,
        "result: {}",
        match (failed, mode) {
            (false, _) => "all checks pass",
            (true, Mode::Asserted) => "FAILED",
            (true, Mode::Exploratory) => "violations found (exploratory, not asserted)",
        }
    )
    .unwrap();
    Ok(Outcome { code, text, result })
}

pub fn operators(settings: &Settings, spec: &str) -> CliResult<Outcome> {
    let op = operator(spec)?;
    let algebras = load_corpus(settings.corpus.as_deref(), &settings.caps)?;
    let mut text = format!("operator {}\n", op.name);
    let mut reports = Vec::new();
    let mut all_monotone = true;
    let mut all_hom = true;
    for alg in &algebras {
        let props = operator_properties(alg, &op, &settings.caps)?;
        let pairs: usize = props.monotone.iter().map(|m| m.pairs_checked).sum();
        let monotone = props.monotone_passed();
        let hom = props.hom_property.passed();
        all_monotone &= monotone;
        all_hom &= hom;
        writeln!(
            text,
            "{:<14} monotone {:<4} ({} nested pairs)  hom property {:<4} ({} homs, {} instances)",
            alg.name(),
            if monotone { "pass" } else { "FAIL" },
            pairs,
            if hom { "pass" } else { "FAIL" },
            props.hom_property.homs_checked,
            props.hom_property.instances
        )
        .unwrap();
        for m in &props.monotone {
            if let Some(c) = &m.counterexample {
                writeln!(
                    text,
                    "  counterexample on {}: R = {} ⊆ S = {} but F(R) = {} ⊄ F(S) = {}",
                    m.algebra, c.smaller, c.larger, c.image_of_smaller, c.image_of_larger
                )
                .unwrap();
            }
        }
        if let Some(v) = props.hom_property.violations.first() {
            writeln!(
                text,
                "  counterexample: h = {:?} : {} -> {}, R = {}: h(F(R)) = {} ⊄ F(h(R)) = {}",
                v.map, v.source, v.target, v.relation, v.image_of_operator, v.operator_of_image
            )
            .unwrap();
        }
        reports.push(props);
    }
    writeln!(
        text,
        "monotone: {}  hom property: {}",
        if all_monotone { "pass" } else { "FAIL" },
        if all_hom { "pass" } else { "FAIL" }
    )
    .unwrap();
    Ok(Outcome {
        code: if all_monotone && all_hom {
            EXIT_OK
        } else {
            EXIT_NOT_FOUND
        },
        text,
        result: json!({
            "operator": op.name,
            "monotone": all_monotone,
            "hom_property": all_hom,
            "algebras": reports,
        }),
    })
}

fn generator_names(k: usize) -> Vec<String> {
    if k <= 3 {
        ["x", "y", "z"][..k].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=k).map(|i| format!("x{i}")).collect()
    }
}

pub fn free(settings: &Settings, algebra: &str, k: usize, witnesses: bool) -> CliResult<Outcome> {
    let alg = settings.algebra(algebra)?;
    let x = free_algebra(&alg, k, &settings.caps)?;
    let names = generator_names(k);
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut text = header(&alg);
    writeln!(text, "free algebra on {k} generators: {} elements", x.len()).unwrap();
    writeln!(
        text,
        "coordinates: {} (one per assignment in A^{k})",
        x.coordinate_count()
    )
    .unwrap();
    writeln!(text, "generators: {:?}", x.generator_indices()).unwrap();
    let mut result = json!({
        "algebra": alg.name(),
        "generators": k,
        "size": x.len(),
        "coordinates": x.coordinate_count(),
        "generator_indices": x.generator_indices(),
    });
    if witnesses {
        let mut elements = Vec::new();
        for (i, values) in x.elements().iter().enumerate() {
            let term = x.witness(i).to_prefix(&names);
            writeln!(text, "  {i:>4}  {term:<30} {values:?}").unwrap();
            elements.push(json!({ "index": i, "term": term, "values": values }));
        }
        result["elements"] = Value::Array(elements);
    }
    Ok(Outcome {
        code: EXIT_OK,
        text,
        result,
    })
}
