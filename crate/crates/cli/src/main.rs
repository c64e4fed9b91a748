//! `malrel`: relational calculus, Mal'cev-modulo term search and clause
//! verification on finite algebras.

mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use malrel_core::{Caps, Route};
use serde_json::json;

use commands::{ClosureArgs, Outcome, SearchArgs, Settings, VerifyArgs};
use input::{CliError, EXIT_USAGE};

/// Schema tag of every structured document.
const SCHEMA: &str = "malrel-report/1";

#[derive(Parser, Debug)]
#[command(name = "malrel", version, about, propagate_version = true)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relation-expression evaluations allowed per clause instance.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Largest free algebra (element count) to build.
    #[arg(long, global = true, default_value_t = Caps::default().max_free_elements, value_parser = positive)]
    cap_free: usize,
    /// Largest input carrier accepted.
    #[arg(long, global = true, default_value_t = Caps::default().max_carrier, value_parser = positive)]
    cap_carrier: usize,
    /// Sampled tuples of arbitrary relations per binding on larger carriers.
    #[arg(long, global = true, default_value_t = 200, value_parser = positive)]
    samples: usize,
    /// Reject operator applications to non-admissible relations instead of
    /// closing them first.
    #[arg(long, global = true)]
    strict: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = positive)]
    threads: Option<usize>,
    /// Directory of `.alg` files consulted for algebra names and by `operators`.
    #[arg(long, global = true, env = "MALREL_CORPUS")]
    corpus: Option<PathBuf>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Structured,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RouteArg {
    Iv,
    Vii,
    X,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Route {
        match r {
            RouteArg::Iv => Route::Iv,
            RouteArg::Vii => Route::Vii,
            RouteArg::X => Route::X,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a relational expression over a relation literal.
    Closure {
        /// Algebra file or bundled algebra name.
        algebra: String,
        /// Relation bound to `R`, e.g. "[[0,1]] adm".
        #[arg(long)]
        rel: String,
        /// Further bindings, NAME=LITERAL.
        #[arg(long = "let", value_name = "NAME=LITERAL")]
        bindings: Vec<String>,
        /// Expression to evaluate, e.g. "cg(R)".
        #[arg(long, default_value = "R")]
        expr: String,
        /// Operator available as `F(...)`.
        #[arg(short = 'F')]
        f: Option<String>,
        /// Operator available as `G(...)`.
        #[arg(short = 'G')]
        g: Option<String>,
    },
    /// Search for a term that is Mal'cev modulo F, G.
    Search {
        algebra: String,
        #[arg(short = 'F')]
        f: String,
        #[arg(short = 'G')]
        g: String,
        #[arg(long, value_enum, default_value_t = RouteArg::Iv)]
        route: RouteArg,
        /// Test the whole inclusion rather than its distinguished pair.
        #[arg(long)]
        full: bool,
    },
    /// Check the relational inclusions implied by a Mal'cev-modulo term.
    Verify {
        algebra: String,
        #[arg(short = 'F')]
        f: String,
        #[arg(short = 'G')]
        g: String,
        /// Clause selection such as "i-xiv" or "vi,ix".
        #[arg(long, default_value = "i-xiv")]
        clauses: String,
        /// Also compare the three search routes and operator properties.
        #[arg(long)]
        routes: bool,
        /// Also check the squared-operator triple.
        #[arg(long)]
        squared: bool,
    },
    /// Check monotonicity and the homomorphism property of an operator.
    Operators {
        #[arg(short = 'F')]
        f: String,
    },
    /// Build the free algebra on k generators.
    Free {
        algebra: String,
        #[arg(short = 'k', value_parser = positive)]
        k: usize,
        /// List every element with a witness term.
        #[arg(long)]
        witnesses: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Closure { .. } => "closure",
            Command::Search { .. } => "search",
            Command::Verify { .. } => "verify",
            Command::Operators { .. } => "operators",
            Command::Free { .. } => "free",
        }
    }
}

fn run(cli: &Cli, settings: &Settings) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Closure {
            algebra,
            rel,
            bindings,
            expr,
            f,
            g,
        } => commands::closure(
            settings,
            &ClosureArgs {
                algebra,
                rel,
                bindings,
                expr,
                f: f.as_deref(),
                g: g.as_deref(),
            },
        ),
        Command::Search {
            algebra,
            f,
            g,
            route,
            full,
        } => commands::search(
            settings,
            &SearchArgs {
                algebra,
                f,
                g,
                route: (*route).into(),
                full: *full,
            },
        ),
        Command::Verify {
            algebra,
            f,
            g,
            clauses,
            routes,
            squared,
        } => commands::verify(
            settings,
            &VerifyArgs {
                algebra,
                f,
                g,
                clauses,
                routes: *routes,
                squared: *squared,
            },
        ),
        Command::Operators { f } => commands::operators(settings, f),
        Command::Free {
            algebra,
            k,
            witnesses,
        } => commands::free(settings, algebra, *k, *witnesses),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let g = &cli.global;
    if let Some(n) = g.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let settings = Settings {
        seed: g.seed,
        budget: g.budget,
        samples: g.samples,
        strict: g.strict,
        caps: Caps {
            max_carrier: g.cap_carrier,
            max_free_elements: g.cap_free,
            ..Caps::default()
        },
        corpus: g.corpus.clone(),
    };
    let config = json!({
        "seed": settings.seed,
        "budget": settings.budget,
        "samples": settings.samples,
        "strict": settings.strict,
        "cap_free": settings.caps.max_free_elements,
        "cap_carrier": settings.caps.max_carrier,
    });
    let command = cli.command.name();
    let outcome = run(&cli, &settings);
    let code = match &outcome {
        Ok(o) => o.code,
        Err(e) => e.code,
    };
    let mut stdout = std::io::stdout().lock();
    let written = match (g.format, &outcome) {
        (Format::Text, Ok(o)) => stdout.write_all(o.text.as_bytes()),
        (Format::Text, Err(e)) => {
            eprintln!("error: {e}");
            Ok(())
        }
        (Format::Structured, _) => {
            let body = match &outcome {
                Ok(o) => json!({ "result": o.result }),
                Err(e) => {
                    eprintln!("error: {e}");
                    json!({ "error": { "kind": e.kind(), "message": e.message } })
                }
            };
            let mut doc = json!({
                "schema": SCHEMA,
                "command": command,
                "config": config,
                "exit_code": code,
            });
            doc.as_object_mut()
                .unwrap()
                .extend(body.as_object().unwrap().clone());
            writeln!(stdout, "{}", serde_json::to_string_pretty(&doc).unwrap())
        }
    };
    // A closed pipe is not worth a panic; the exit code still reports the run.
    let _ = written.and_then(|_| stdout.flush());
    ExitCode::from(code)
}
