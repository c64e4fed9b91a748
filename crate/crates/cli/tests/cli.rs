use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/corpus");

fn malrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_malrel"))
        .args(args)
        .env_remove("MALREL_CORPUS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Runs with structured output and returns the exit code and document.
fn structured(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "structured"];
    full.extend_from_slice(args);
    let out = malrel(&full);
    let doc: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", stderr(&out)));
    assert_eq!(doc["schema"], "malrel-report/1");
    assert_eq!(doc["exit_code"], code(&out));
    (code(&out), doc)
}

fn pairs(v: &Value) -> Vec<(u64, u64)> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_u64().unwrap(), p[1].as_u64().unwrap()))
        .collect()
}

fn copy_corpus(dir: &Path, names: &[&str]) {
    for name in names {
        fs::copy(
            Path::new(CORPUS).join(format!("{name}.alg")),
            dir.join(format!("{name}.alg")),
        )
        .unwrap();
    }
}

#[test]
fn search_exit_codes() {
    let found = malrel(&["search", "z2.alg", "-F", "diag", "-G", "diag"]);
    assert_eq!(code(&found), 0, "{}", stderr(&found));
    assert!(stdout(&found).contains("term: t(x,y,z) = "));

    let none = malrel(&["search", "semilattice2.alg", "-F", "diag", "-G", "diag"]);
    assert_eq!(code(&none), 1);
    assert!(stdout(&none).lines().any(|l| l == "none"));

    let (c, doc) = structured(&["search", "semilattice2.alg", "-F", "cg", "-G", "cg"]);
    assert_eq!(c, 0);
    assert_eq!(doc["result"]["found"], true);
    assert_eq!(
        doc["result"]["check"]["violations"]
            .as_array()
            .unwrap()
            .len(),
        0
    );
}

#[test]
fn every_route_agrees_on_the_examples() {
    for route in ["iv", "vii", "x"] {
        let z2 = malrel(&["search", "z2", "-F", "diag", "-G", "diag", "--route", route]);
        assert_eq!(code(&z2), 0, "{route}");
        let sl = malrel(&[
            "search",
            "semilattice2",
            "-F",
            "diag",
            "-G",
            "diag",
            "--route",
            route,
        ]);
        assert_eq!(code(&sl), 1, "{route}");
    }
    let full = malrel(&[
        "search", "z2", "-F", "diag", "-G", "diag", "--route", "x", "--full",
    ]);
    assert_eq!(code(&full), 0);
    let bad = malrel(&["search", "z2", "-F", "diag", "-G", "diag", "--full"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn free_algebra_sizes() {
    for (alg, k, size) in [
        ("semilattice2.alg", "2", 3),
        ("semilattice2.alg", "3", 7),
        ("z2.alg", "2", 4),
    ] {
        let (c, doc) = structured(&["free", alg, "-k", k]);
        assert_eq!(c, 0);
        assert_eq!(doc["result"]["size"], size, "{alg} k={k}");
    }
    let out = malrel(&["free", "z2", "-k", "2", "--witnesses"]);
    assert_eq!(
        stdout(&out)
            .lines()
            .filter(|l| l.starts_with("     "))
            .count(),
        4
    );
}

#[test]
fn cap_exceeded_exits_3() {
    let out = malrel(&["free", "semilattice2", "-k", "3", "--cap-free", "5"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("reached"), "{}", stderr(&out));
    let out = malrel(&[
        "search",
        "semilattice3",
        "-F",
        "cg",
        "-G",
        "cg",
        "--cap-free",
        "2",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn closure_examples() {
    let (c, doc) = structured(&[
        "closure",
        "semilattice2.alg",
        "--rel",
        "[[0,1]] adm",
        "--expr",
        "cg(R)",
    ]);
    assert_eq!(c, 0);
    assert_eq!(
        pairs(&doc["result"]["relation"]),
        [(0, 0), (0, 1), (1, 0), (1, 1)]
    );

    let (_, echo) = structured(&[
        "closure",
        "semilattice2.alg",
        "--rel",
        "[[0,1]] adm",
        "--expr",
        "R",
    ]);
    assert_eq!(pairs(&echo["result"]["relation"]), [(0, 0), (0, 1), (1, 1)]);

    for lit in ["[[0,1],[2,0]]", "[[1,2]] refl", "[]", "[[0,1]] adm"] {
        let (_, id) = structured(&["closure", "z3", "--rel", lit]);
        let (_, twice) = structured(&["closure", "z3", "--rel", lit, "--expr", "conv(conv(R))"]);
        assert_eq!(
            id["result"]["relation"], twice["result"]["relation"],
            "{lit}"
        );
    }

    let text = stdout(&malrel(&[
        "closure", "z2", "--rel", "[[0,1]]", "--expr", "R o R",
    ]));
    assert!(text.contains("matrix:\n  00\n  00\n"), "{text}");
}

#[test]
fn closure_bindings_and_operators() {
    let (c, doc) = structured(&[
        "closure",
        "semilattice3",
        "--rel",
        "[[0,1]] adm",
        "--let",
        "S=[[1,2]] adm",
        "--expr",
        "F(R + S) & G(S)",
        "-F",
        "cg",
        "-G",
        "id",
    ]);
    assert_eq!(c, 0, "{doc}");
    assert!(doc["result"]["bindings"]["S"].is_array());
}

#[test]
fn strict_mode_rejects_what_lenient_mode_coerces() {
    let args = [
        "closure",
        "semilattice2",
        "--rel",
        "[[1,0]]",
        "--expr",
        "F(R)",
        "-F",
        "id",
    ];
    let (c, doc) = structured(&args);
    assert_eq!(c, 0);
    assert_eq!(doc["result"]["coercions"].as_array().unwrap().len(), 1);
    let strict = malrel(&[&args[..], &["--strict"]].concat());
    assert_eq!(code(&strict), 2);
    assert!(stderr(&strict).contains("strict"), "{}", stderr(&strict));
}

#[test]
fn parse_errors_exit_2_with_a_location() {
    let bad_rel = malrel(&["closure", "z2", "--rel", "[[0,1]] bogus"]);
    assert_eq!(code(&bad_rel), 2);
    assert!(stderr(&bad_rel).contains("offset 8"));

    let bad_json = malrel(&["closure", "z2", "--rel", "[[0,1]"]);
    assert_eq!(code(&bad_json), 2);
    assert!(
        stderr(&bad_json).contains("column"),
        "{}",
        stderr(&bad_json)
    );

    let bad_expr = malrel(&["closure", "z2", "--rel", "[]", "--expr", "R o (S"]);
    assert_eq!(code(&bad_expr), 2);
    assert!(stderr(&bad_expr).contains("offset"));

    let bad_op = malrel(&["search", "z2", "-F", "nonsense", "-G", "diag"]);
    assert_eq!(code(&bad_op), 2);

    let bad_clause = malrel(&[
        "verify",
        "z2",
        "-F",
        "diag",
        "-G",
        "diag",
        "--clauses",
        "xv",
    ]);
    assert_eq!(code(&bad_clause), 2);

    let missing = malrel(&["search", "z2", "-F", "diag"]);
    assert_eq!(code(&missing), 2);

    let unknown = malrel(&["free", "no-such-algebra", "-k", "2"]);
    assert_eq!(code(&unknown), 2);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.alg");
    fs::write(
        &path,
        "{\n  \"name\": \"b\",\n  \"size\": 2,\n  \"colour\": 1\n}\n",
    )
    .unwrap();
    let broken = malrel(&["free", path.to_str().unwrap(), "-k", "2"]);
    assert_eq!(code(&broken), 2);
    assert!(stderr(&broken).contains("line 4"), "{}", stderr(&broken));
}

#[test]
fn algebra_files_and_corpus_lookup() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain.alg");
    fs::write(
        &path,
        r#"{"name": "chain", "size": 3, "operations": [{"name": "max", "arity": 2, "table": [0,1,2,1,1,2,2,2,2]}]}"#,
    )
    .unwrap();
    let (c, doc) = structured(&["free", path.to_str().unwrap(), "-k", "2"]);
    assert_eq!(c, 0);
    assert_eq!(doc["result"]["algebra"], "chain");
    assert_eq!(doc["result"]["size"], 3);

    let (c, doc) = structured(&[
        "free",
        "chain",
        "-k",
        "3",
        "--corpus",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(c, 0);
    assert_eq!(doc["result"]["size"], 7);
}

#[test]
fn verify_examples() {
    let (c, doc) = structured(&[
        "verify",
        "z2.alg",
        "-F",
        "diag",
        "-G",
        "diag",
        "--clauses",
        "i-xiv",
    ]);
    assert_eq!(c, 0);
    assert_eq!(doc["result"]["mode"], "asserted");
    let clauses = doc["result"]["clauses"].as_array().unwrap();
    assert_eq!(clauses.len(), 26);
    assert!(clauses.iter().all(|r| r["status"] == "pass"), "{doc}");

    let (c, doc) = structured(&[
        "verify",
        "semilattice2.alg",
        "-F",
        "cg",
        "-G",
        "cg",
        "--clauses",
        "vi,ix",
    ]);
    assert_eq!(c, 0);
    let labels: Vec<&str> = doc["result"]["clauses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["clause"].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["vi", "ix"]);

    // No witness: the report is exploratory and never fails the run.
    let (c, doc) = structured(&["verify", "semilattice2.alg", "-F", "diag", "-G", "diag"]);
    assert_eq!(c, 0);
    assert_eq!(doc["result"]["mode"], "exploratory");
    assert!(doc["result"]["clauses"]
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["status"] == "fail"));
}

#[test]
fn verify_routes_and_squared_operators() {
    let (c, doc) = structured(&[
        "verify",
        "semilattice2",
        "-F",
        "cg",
        "-G",
        "cg",
        "--clauses",
        "vi",
        "--routes",
        "--squared",
    ]);
    assert_eq!(c, 0);
    assert_eq!(doc["result"]["routes"]["agree"], true);
    assert_eq!(doc["result"]["routes"]["status"], "pass");
    assert_eq!(doc["result"]["squared"]["status"], "pass");
}

#[test]
fn structured_output_is_reproducible() {
    let args = [
        "--format",
        "structured",
        "verify",
        "semilattice3",
        "-F",
        "tol",
        "-G",
        "cg",
        "--clauses",
        "i,ii,xii",
        "--seed",
        "11",
    ];
    let a = malrel(&args);
    let b = malrel(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let threads = malrel(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a.stdout, threads.stdout);
}

#[test]
fn operator_checks() {
    let dir = tempfile::tempdir().unwrap();
    copy_corpus(dir.path(), &["semilattice2", "z2"]);
    let corpus = dir.path().to_str().unwrap();

    for spec in ["tc", "diag"] {
        let (c, doc) = structured(&["operators", "-F", spec, "--corpus", corpus]);
        assert_eq!(c, 0, "{spec}");
        assert_eq!(doc["result"]["monotone"], true);
        assert_eq!(doc["result"]["hom_property"], true);
    }

    let out = malrel(&[
        "operators",
        "-F",
        "expr:full-if-nontrivial",
        "--corpus",
        corpus,
    ]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("monotone FAIL"), "{text}");
    assert!(
        text.contains("counterexample on semilattice2: R = [[0,0],"),
        "{text}"
    );

    // The environment variable supplies the corpus when no flag is given.
    let env = Command::new(env!("CARGO_BIN_EXE_malrel"))
        .args(["operators", "-F", "diag"])
        .env("MALREL_CORPUS", corpus)
        .output()
        .unwrap();
    assert_eq!(code(&env), 0);
    assert_eq!(
        stdout(&env)
            .lines()
            .filter(|l| l.contains("monotone pass"))
            .count(),
        2
    );
}
