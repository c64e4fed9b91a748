//! Resolving algebra arguments and parsing relation literals.

use std::fmt;
use std::path::{Path, PathBuf};

use malrel_core::{corpus, generated_admissible, BinaryRelation, Caps, Error, FiniteAlgebra};

/// Exit codes are part of the command-line contract.
pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_FOUND: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CAP: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.code {
            EXIT_CAP => "cap",
            _ => "usage",
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: if e.is_cap() { EXIT_CAP } else { EXIT_USAGE },
            message: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// An existing file path wins; then `<corpus>/<arg>` (with or without the
/// `.alg` suffix); then a bundled algebra of that name.
pub fn load_algebra(arg: &str, corpus_dir: Option<&Path>, caps: &Caps) -> CliResult<FiniteAlgebra> {
    let direct = PathBuf::from(arg);
    if direct.is_file() {
        return Ok(FiniteAlgebra::from_file(&direct, caps)?);
    }
    if let Some(dir) = corpus_dir {
        for candidate in [dir.join(arg), dir.join(format!("{arg}.alg"))] {
            if candidate.is_file() {
                return Ok(FiniteAlgebra::from_file(&candidate, caps)?);
            }
        }
    }
    match corpus::bundled_algebra(arg) {
        Some(alg) if alg.size() <= caps.max_carrier => Ok(alg),
        Some(alg) => Err(Error::CapExceeded {
            what: "carrier size".into(),
            limit: caps.max_carrier,
            reached: alg.size(),
        }
        .into()),
        None => Err(CliError::usage(format!(
            "`{arg}` is neither an algebra file nor a bundled algebra (bundled: {})",
            corpus::BUNDLED
                .iter()
                .map(|(file, _)| file.trim_end_matches(".alg"))
                .collect::<Vec<_>>()
                .join(", ")
        ))),
    }
}

/// Every algebra of a corpus directory, or the bundled corpus without one.
pub fn load_corpus(dir: Option<&Path>, caps: &Caps) -> CliResult<Vec<FiniteAlgebra>> {
    match dir {
        Some(dir) => {
            let algebras = corpus::load_dir(dir, caps)?;
            if algebras.is_empty() {
                return Err(CliError::usage(format!(
                    "no .alg files in {}",
                    dir.display()
                )));
            }
            Ok(algebras)
        }
        None => Ok(corpus::bundled()),
    }
}

/// Parses `[[a,b],...] flag...` where the flags are `refl`
/// (`reflexive_close`) and `adm` (`admissible_close`).
pub fn parse_relation(text: &str, alg: &FiniteAlgebra) -> CliResult<BinaryRelation> {
    let mut stream = serde_json::Deserializer::from_str(text).into_iter::<Vec<[usize; 2]>>();
    let pairs = match stream.next() {
        Some(Ok(pairs)) => pairs,
        Some(Err(e)) => {
            return Err(CliError::usage(format!(
                "relation literal: {e} (expected [[a,b],...] followed by flags)"
            )))
        }
        None => return Err(CliError::usage("relation literal is empty")),
    };
    let end = stream.byte_offset();
    let mut reflexive = false;
    let mut admissible = false;
    for flag in text[end..].split_whitespace() {
        match flag {
            "refl" | "reflexive_close" => reflexive = true,
            "adm" | "admissible_close" => admissible = true,
            other => {
                let offset = other.as_ptr() as usize - text.as_ptr() as usize;
                return Err(CliError::usage(format!(
                    "relation literal: unknown flag `{other}` at offset {offset} \
                     (expected refl, reflexive_close, adm or admissible_close)"
                )));
            }
        }
    }
    let n = alg.size();
    let pairs: Vec<(usize, usize)> = pairs.into_iter().map(|[a, b]| (a, b)).collect();
    if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| a >= n || b >= n) {
        return Err(CliError::usage(format!(
            "relation literal: pair [{a},{b}] is outside the carrier of `{}` (size {n})",
            alg.name()
        )));
    }
    if admissible {
        return Ok(generated_admissible(alg, &pairs)?.into());
    }
    let mut rel = BinaryRelation::from_pairs(n, pairs)?;
    if reflexive {
        rel = rel.union(&BinaryRelation::diagonal(n))?;
    }
    Ok(rel)
}

/// `NAME=LITERAL` for extra relation variables.
pub fn parse_binding(text: &str, alg: &FiniteAlgebra) -> CliResult<(String, BinaryRelation)> {
    let (name, literal) = text
        .split_once('=')
        .ok_or_else(|| CliError::usage(format!("binding `{text}`: expected NAME=LITERAL")))?;
    let name = name.trim();
    let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !valid {
        return Err(CliError::usage(format!(
            "binding `{text}`: invalid name `{name}`"
        )));
    }
    Ok((name.to_string(), parse_relation(literal, alg)?))
}
