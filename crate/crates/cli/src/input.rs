//! Alphabet and input resolution shared by the subcommands.

use std::path::{Path, PathBuf};

use thiserror::Error;
use topkat::atoms::AtomError;
use topkat::syntax::{DEFAULT_ATOM_CAP, MAX_ATOM_CAP};
use topkat::{Alphabet, EngineError, LogicError, ModelError, SyntaxError};

pub const ATOM_CAP_VAR: &str = "TOPKAT_ATOM_CAP";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Atoms(#[from] AtomError),
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("oracle and engine disagree: {0}")]
    Disagreement(String),
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// The test cap, from the environment when set.
pub fn atom_cap() -> Result<usize, CliError> {
    match std::env::var(ATOM_CAP_VAR) {
        Err(_) => Ok(DEFAULT_ATOM_CAP),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n <= MAX_ATOM_CAP => Ok(n),
            _ => Err(usage(format!("{ATOM_CAP_VAR} must be an integer between 0 and {MAX_ATOM_CAP}, got `{v}`"))),
        },
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Contents of an input file: an optional `actions:`/`tests:` header and
/// one input per remaining non-blank line. Lines starting with `#` are
/// comments.
#[derive(Debug, Default)]
pub struct Source {
    pub header: Option<Alphabet>,
    pub lines: Vec<String>,
}

fn has_header(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.starts_with("actions:") || l.starts_with("tests:"))
}

pub fn parse_source(text: &str, cap: usize) -> Result<Source, CliError> {
    let (header, body) = if has_header(text) {
        let (a, rest) = Alphabet::parse_header_with_cap(text, cap)?;
        (Some(a), rest)
    } else {
        (None, text)
    };
    let lines = body
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect();
    Ok(Source { header, lines })
}

/// Alphabet flags and the optional input file, as given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Decls {
    pub actions: Option<String>,
    pub tests: Option<String>,
    pub file: Option<PathBuf>,
}

fn symbols(list: &str) -> Vec<String> {
    list.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

impl Decls {
    /// Positional inputs, or the lines of the input file when none were
    /// given. Exactly `count` inputs are required.
    pub fn inputs(&self, positional: &[String], count: usize) -> Result<(Option<Alphabet>, Vec<String>), CliError> {
        let source = match &self.file {
            Some(path) => parse_source(&read_text(path)?, atom_cap()?)?,
            None => Source::default(),
        };
        let texts = if positional.is_empty() { source.lines } else { positional.to_vec() };
        if texts.len() != count {
            return Err(usage(format!("expected {count} input(s), got {}", texts.len())));
        }
        Ok((source.header, texts))
    }

    /// Explicit flags win over a file header, which wins over inference.
    /// When only one of `--actions`/`--tests` is given, the other list is
    /// every remaining symbol of the base alphabet.
    pub fn alphabet(
        &self,
        header: Option<Alphabet>,
        infer: impl FnOnce(usize) -> Result<Alphabet, CliError>,
    ) -> Result<Alphabet, CliError> {
        let cap = atom_cap()?;
        let actions = self.actions.as_deref().map(symbols);
        let tests = self.tests.as_deref().map(symbols);
        if let (Some(a), Some(t)) = (&actions, &tests) {
            return Ok(Alphabet::with_cap(a.clone(), t.clone(), cap)?);
        }
        let base = match header {
            Some(h) => h,
            None => infer(cap)?,
        };
        if actions.is_none() && tests.is_none() {
            return Ok(base);
        }
        let all: Vec<String> = base.actions().iter().chain(base.tests()).cloned().collect();
        let rest = |given: &[String]| -> Vec<String> { all.iter().filter(|s| !given.contains(s)).cloned().collect() };
        let (a, t) = match (actions, tests) {
            (Some(a), None) => {
                let t = rest(&a);
                (a, t)
            }
            (None, Some(t)) => (rest(&t), t),
            _ => unreachable!(),
        };
        Ok(Alphabet::with_cap(a, t, cap)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decls(actions: Option<&str>, tests: Option<&str>) -> Decls {
        Decls { actions: actions.map(str::to_string), tests: tests.map(str::to_string), file: None }
    }

    fn inferred(cap: usize) -> Result<Alphabet, CliError> {
        Ok(Alphabet::infer_with_cap(&["b;p + ~c;q"], &[], cap)?)
    }

    #[test]
    fn flags_override_inference() {
        let a = decls(Some("p"), Some("")).alphabet(None, inferred).unwrap();
        assert_eq!(a.actions(), ["p"]);
        assert!(a.tests().is_empty());
    }

    #[test]
    fn single_flag_takes_the_rest() {
        let a = decls(None, Some("b,c")).alphabet(None, inferred).unwrap();
        assert_eq!(a.actions().len(), 2);
        assert_eq!(a.tests(), ["b", "c"]);
    }

    #[test]
    fn header_then_lines() {
        let src = parse_source("# pair\nactions: p q\ntests: b\n\nb;p\n# c\np + q\n", 16).unwrap();
        let h = src.header.unwrap();
        assert_eq!(h.actions(), ["p", "q"]);
        assert_eq!(src.lines, ["b;p", "p + q"]);
    }

    #[test]
    fn headerless_file() {
        let src = parse_source("p\nq;p\n", 16).unwrap();
        assert!(src.header.is_none());
        assert_eq!(src.lines.len(), 2);
    }
}
