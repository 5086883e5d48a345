//! Alphabets, term syntax, parsing and printing.
//!
//! Terms are plain syntax trees. They carry no alphabet: an identifier is
//! resolved to an action or a test when a term is parsed against an
//! [`Alphabet`], and [`validate`] can re-check one term against several
//! alphabets.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Internal action symbol standing for `top` after top-elimination.
///
/// It is not a valid identifier, so it can never clash with a user symbol.
pub const TAU: &str = "τ";

/// Words that can never be used as action or test names.
pub const RESERVED: [&str; 4] = ["top", "fail", "ok", "er"];

/// Default bound on the number of tests (atoms grow as `2^|tests|`).
pub const DEFAULT_ATOM_CAP: usize = 16;

/// Hard limit on the test cap; atoms are stored in a `u32`.
pub const MAX_ATOM_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
    #[error("negation applied to `{0}`, which is not a test (tests may not contain actions, top, fail or star)")]
    NegationOverNonTest(String),
    #[error("star applied to the test `{0}`; a starred test always equals 1, write `1` instead")]
    StarOverTest(String),
    #[error("`{feature}` is not allowed in {mode} terms")]
    Disallowed { feature: &'static str, mode: TermKind },
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("symbol `{0}` declared twice")]
    Duplicate(String),
    #[error("symbol `{0}` declared both as an action and as a test")]
    NotDisjoint(String),
    #[error("{count} tests exceed the atom cap of {cap}")]
    TooManyTests { count: usize, cap: usize },
    #[error("error statement used outside fail mode")]
    ErrorOutsideFailMode,
    #[error("malformed alphabet header: {0}")]
    Header(String),
}

/// Checks the identifier rule `[a-z][a-zA-Z0-9_]*` minus reserved words.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !RESERVED.contains(&s)
}

/// A pair of disjoint, ordered symbol lists: primitive actions and
/// primitive tests.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    actions: Vec<String>,
    tests: Vec<String>,
    #[serde(skip, default = "default_cap")]
    test_cap: usize,
}

fn default_cap() -> usize {
    DEFAULT_ATOM_CAP
}

impl Alphabet {
    pub fn new<A, T>(actions: A, tests: T) -> Result<Self, SyntaxError>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        T: IntoIterator,
        T::Item: Into<String>,
    {
        Self::with_cap(actions, tests, DEFAULT_ATOM_CAP)
    }

    pub fn with_cap<A, T>(actions: A, tests: T, test_cap: usize) -> Result<Self, SyntaxError>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        T: IntoIterator,
        T::Item: Into<String>,
    {
        let actions: Vec<String> = actions.into_iter().map(Into::into).collect();
        let tests: Vec<String> = tests.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for s in &actions {
            if !is_identifier(s) {
                return Err(SyntaxError::InvalidIdentifier(s.clone()));
            }
            if !seen.insert(s.as_str()) {
                return Err(SyntaxError::Duplicate(s.clone()));
            }
        }
        let mut seen_tests = BTreeSet::new();
        for s in &tests {
            if !is_identifier(s) {
                return Err(SyntaxError::InvalidIdentifier(s.clone()));
            }
            if seen.contains(s.as_str()) {
                return Err(SyntaxError::NotDisjoint(s.clone()));
            }
            if !seen_tests.insert(s.as_str()) {
                return Err(SyntaxError::Duplicate(s.clone()));
            }
        }
        let test_cap = test_cap.min(MAX_ATOM_CAP);
        if tests.len() > test_cap {
            return Err(SyntaxError::TooManyTests { count: tests.len(), cap: test_cap });
        }
        Ok(Alphabet { actions, tests, test_cap })
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn tests(&self) -> &[String] {
        &self.tests
    }

    pub fn test_cap(&self) -> usize {
        self.test_cap
    }

    pub fn is_action(&self, s: &str) -> bool {
        self.actions.iter().any(|a| a == s)
    }

    pub fn is_test(&self, s: &str) -> bool {
        self.tests.iter().any(|b| b == s)
    }

    pub fn test_index(&self, s: &str) -> Option<usize> {
        self.tests.iter().position(|b| b == s)
    }

    pub fn action_index(&self, s: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == s)
    }

    /// Parses header lines `actions: p q` / `tests: a b` at the start of
    /// `text`. Returns the alphabet and the remaining text. Blank lines and
    /// lines starting with `#` before or between the headers are skipped.
    pub fn parse_header(text: &str) -> Result<(Alphabet, &str), SyntaxError> {
        Self::parse_header_with_cap(text, DEFAULT_ATOM_CAP)
    }

    pub fn parse_header_with_cap(text: &str, test_cap: usize) -> Result<(Alphabet, &str), SyntaxError> {
        let mut actions: Option<Vec<String>> = None;
        let mut tests: Option<Vec<String>> = None;
        let mut rest = text;
        loop {
            let (line, tail) = match rest.find('\n') {
                Some(i) => (&rest[..i], &rest[i + 1..]),
                None => (rest, ""),
            };
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                if tail.is_empty() && line.is_empty() {
                    break;
                }
                rest = tail;
                if rest.is_empty() {
                    break;
                }
                continue;
            }
            let split_list = |body: &str| -> Vec<String> {
                body.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect()
            };
            if let Some(body) = trimmed.strip_prefix("actions:") {
                if actions.replace(split_list(body)).is_some() {
                    return Err(SyntaxError::Header("`actions:` given twice".into()));
                }
            } else if let Some(body) = trimmed.strip_prefix("tests:") {
                if tests.replace(split_list(body)).is_some() {
                    return Err(SyntaxError::Header("`tests:` given twice".into()));
                }
            } else {
                break;
            }
            rest = tail;
        }
        if actions.is_none() && tests.is_none() {
            return Err(SyntaxError::Header("expected `actions:` or `tests:` line".into()));
        }
        let alphabet = Alphabet::with_cap(actions.unwrap_or_default(), tests.unwrap_or_default(), test_cap)?;
        Ok((alphabet, rest))
    }

    /// Guesses an alphabet from raw term texts: identifiers that occur under
    /// `~` or in `test_texts` are tests, every other identifier is an action.
    pub fn infer(term_texts: &[&str], test_texts: &[&str]) -> Result<Alphabet, SyntaxError> {
        Self::infer_with_cap(term_texts, test_texts, DEFAULT_ATOM_CAP)
    }

    pub fn infer_with_cap(term_texts: &[&str], test_texts: &[&str], test_cap: usize) -> Result<Alphabet, SyntaxError> {
        let mut tests = BTreeSet::new();
        let mut all = BTreeSet::new();
        for text in term_texts {
            let raw = Parser::new(text)?.parse_all()?;
            raw.collect_idents(false, &mut all, &mut tests);
        }
        for text in test_texts {
            let raw = Parser::new(text)?.parse_all()?;
            raw.collect_idents(true, &mut all, &mut tests);
        }
        let actions: Vec<String> = all.difference(&tests).cloned().collect();
        Alphabet::with_cap(actions, tests, test_cap)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "actions: {}; tests: {}", self.actions.join(" "), self.tests.join(" "))
    }
}

/// The feature level of a term: `Kat ⊂ TopKat ⊂ FailTopKat`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TermKind {
    Kat,
    TopKat,
    FailTopKat,
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TermKind::Kat => "KAT",
            TermKind::TopKat => "TopKAT",
            TermKind::FailTopKat => "FailTopKAT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Zero,
    One,
    Top,
    Fail,
    Act(String),
    Test(String),
    Plus(Box<Term>, Box<Term>),
    Seq(Box<Term>, Box<Term>),
    Star(Box<Term>),
    Not(Box<Term>),
}

impl Term {
    pub fn act(s: impl Into<String>) -> Term {
        Term::Act(s.into())
    }

    pub fn test(s: impl Into<String>) -> Term {
        Term::Test(s.into())
    }

    pub fn plus(self, rhs: Term) -> Term {
        Term::Plus(Box::new(self), Box::new(rhs))
    }

    pub fn seq(self, rhs: Term) -> Term {
        Term::Seq(Box::new(self), Box::new(rhs))
    }

    pub fn star(self) -> Term {
        Term::Star(Box::new(self))
    }

    pub fn not(self) -> Term {
        Term::Not(Box::new(self))
    }

    /// Left-nested sum; `0` when empty.
    pub fn sum<I: IntoIterator<Item = Term>>(terms: I) -> Term {
        terms.into_iter().reduce(Term::plus).unwrap_or(Term::Zero)
    }

    /// Left-nested product; `1` when empty.
    pub fn product<I: IntoIterator<Item = Term>>(terms: I) -> Term {
        terms.into_iter().reduce(Term::seq).unwrap_or(Term::One)
    }

    pub fn kind(&self) -> TermKind {
        match self {
            Term::Fail => TermKind::FailTopKat,
            Term::Top => TermKind::TopKat,
            Term::Zero | Term::One | Term::Act(_) | Term::Test(_) => TermKind::Kat,
            Term::Plus(a, b) | Term::Seq(a, b) => a.kind().max(b.kind()),
            Term::Star(a) | Term::Not(a) => a.kind(),
        }
    }

    /// True when the term is built only from `0`, `1`, test symbols, `+`,
    /// `;` and `~`.
    pub fn is_test_only(&self) -> bool {
        match self {
            Term::Zero | Term::One | Term::Test(_) => true,
            Term::Top | Term::Fail | Term::Act(_) | Term::Star(_) => false,
            Term::Plus(a, b) | Term::Seq(a, b) => a.is_test_only() && b.is_test_only(),
            Term::Not(a) => a.is_test_only(),
        }
    }

    pub fn contains_top(&self) -> bool {
        self.kind() >= TermKind::TopKat && self.any(&|t| matches!(t, Term::Top))
    }

    pub fn contains_fail(&self) -> bool {
        self.kind() == TermKind::FailTopKat
    }

    fn any(&self, pred: &dyn Fn(&Term) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Term::Plus(a, b) | Term::Seq(a, b) => a.any(pred) || b.any(pred),
            Term::Star(a) | Term::Not(a) => a.any(pred),
            _ => false,
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Plus(a, b) | Term::Seq(a, b) => 1 + a.size() + b.size(),
            Term::Star(a) | Term::Not(a) => 1 + a.size(),
            _ => 1,
        }
    }

    /// Replaces every action symbol for which `f` returns `Some`.
    pub fn map_actions(&self, f: &dyn Fn(&str) -> Option<Term>) -> Term {
        self.map_leaves(&|t| match t {
            Term::Act(a) => f(a),
            _ => None,
        })
    }

    /// Replaces every test symbol for which `f` returns `Some`.
    pub fn map_tests(&self, f: &dyn Fn(&str) -> Option<Term>) -> Term {
        self.map_leaves(&|t| match t {
            Term::Test(b) => f(b),
            _ => None,
        })
    }

    /// Rebuilds the term, substituting leaves for which `f` returns `Some`.
    pub fn map_leaves(&self, f: &dyn Fn(&Term) -> Option<Term>) -> Term {
        match self {
            Term::Plus(a, b) => a.map_leaves(f).plus(b.map_leaves(f)),
            Term::Seq(a, b) => a.map_leaves(f).seq(b.map_leaves(f)),
            Term::Star(a) => a.map_leaves(f).star(),
            Term::Not(a) => a.map_leaves(f).not(),
            leaf => f(leaf).unwrap_or_else(|| leaf.clone()),
        }
    }

    /// Canonical fully parenthesized text; see [`print_term`].
    pub fn to_canonical(&self) -> String {
        let mut out = String::new();
        write_canonical(self, &mut out);
        out
    }
}

/// Canonical fully parenthesized rendering. `parse_term` inverts it exactly.
pub fn print_term(t: &Term) -> String {
    t.to_canonical()
}

fn write_canonical(t: &Term, out: &mut String) {
    match t {
        Term::Zero => out.push('0'),
        Term::One => out.push('1'),
        Term::Top => out.push_str("top"),
        Term::Fail => out.push_str("fail"),
        Term::Act(s) | Term::Test(s) => out.push_str(s),
        Term::Plus(a, b) => {
            out.push('(');
            write_canonical(a, out);
            out.push_str(" + ");
            write_canonical(b, out);
            out.push(')');
        }
        Term::Seq(a, b) => {
            out.push('(');
            write_canonical(a, out);
            out.push(';');
            write_canonical(b, out);
            out.push(')');
        }
        Term::Star(a) => {
            out.push('(');
            write_canonical(a, out);
            out.push_str(")*");
        }
        Term::Not(a) => {
            out.push('~');
            write_canonical(a, out);
        }
    }
}

/// Human-oriented rendering with the fewest parentheses that still parse
/// back to the same tree.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pretty(self, 0, f)
    }
}

// Precedence levels: 0 sum, 1 seq, 2 unary.
fn write_pretty(t: &Term, ctx: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Plus(a, b) => {
            if ctx > 0 {
                f.write_str("(")?;
            }
            write_pretty(a, 0, f)?;
            f.write_str(" + ")?;
            write_pretty(b, 1, f)?;
            if ctx > 0 {
                f.write_str(")")?;
            }
            Ok(())
        }
        Term::Seq(a, b) => {
            if ctx > 1 {
                f.write_str("(")?;
            }
            write_pretty(a, 1, f)?;
            f.write_str(";")?;
            write_pretty(b, 2, f)?;
            if ctx > 1 {
                f.write_str(")")?;
            }
            Ok(())
        }
        Term::Star(a) => {
            // `~x*` reads as `~(x*)`, so a negation under a star needs parens.
            match **a {
                Term::Plus(..) | Term::Seq(..) | Term::Not(..) => {
                    f.write_str("(")?;
                    write_pretty(a, 0, f)?;
                    f.write_str(")")?;
                }
                _ => write_pretty(a, 2, f)?,
            }
            f.write_str("*")
        }
        Term::Not(a) => {
            f.write_str("~")?;
            write_pretty(a, 2, f)
        }
        Term::Zero => f.write_str("0"),
        Term::One => f.write_str("1"),
        Term::Top => f.write_str("top"),
        Term::Fail => f.write_str("fail"),
        Term::Act(s) | Term::Test(s) => f.write_str(s),
    }
}

/// Parses `text` against `alphabet`, allowing the full FailTopKAT syntax.
pub fn parse_term(text: &str, alphabet: &Alphabet) -> Result<Term, SyntaxError> {
    parse_term_as(text, alphabet, TermKind::FailTopKat)
}

/// Parses `text` against `alphabet`, rejecting features above `max_kind`.
pub fn parse_term_as(text: &str, alphabet: &Alphabet, max_kind: TermKind) -> Result<Term, SyntaxError> {
    let raw = Parser::new(text)?.parse_all()?;
    let term = raw.resolve(alphabet)?;
    validate(&term, alphabet, max_kind)?;
    Ok(term)
}

/// Checks a term against an alphabet and a feature ceiling. Returns the
/// term's kind.
pub fn validate(t: &Term, alphabet: &Alphabet, max_kind: TermKind) -> Result<TermKind, SyntaxError> {
    check_node(t, alphabet, max_kind)?;
    Ok(t.kind())
}

fn check_node(t: &Term, alphabet: &Alphabet, max_kind: TermKind) -> Result<(), SyntaxError> {
    match t {
        Term::Zero | Term::One => Ok(()),
        Term::Top if max_kind < TermKind::TopKat => {
            Err(SyntaxError::Disallowed { feature: "top", mode: max_kind })
        }
        Term::Fail if max_kind < TermKind::FailTopKat => {
            Err(SyntaxError::Disallowed { feature: "fail", mode: max_kind })
        }
        Term::Top | Term::Fail => Ok(()),
        Term::Act(a) if alphabet.is_action(a) => Ok(()),
        Term::Test(b) if alphabet.is_test(b) => Ok(()),
        Term::Act(s) | Term::Test(s) => Err(SyntaxError::Undeclared(s.clone())),
        Term::Plus(a, b) | Term::Seq(a, b) => {
            check_node(a, alphabet, max_kind)?;
            check_node(b, alphabet, max_kind)
        }
        Term::Not(a) => {
            if !a.is_test_only() {
                return Err(SyntaxError::NegationOverNonTest(a.to_string()));
            }
            check_node(a, alphabet, max_kind)
        }
        Term::Star(a) => {
            if a.is_test_only() && !matches!(**a, Term::Zero | Term::One) {
                return Err(SyntaxError::StarOverTest(a.to_string()));
            }
            check_node(a, alphabet, max_kind)
        }
    }
}

/// Exact sets of action and test symbols occurring in `t`.
pub fn occurring_primitives(t: &Term) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut actions = BTreeSet::new();
    let mut tests = BTreeSet::new();
    collect_primitives(t, &mut actions, &mut tests);
    (actions, tests)
}

fn collect_primitives(t: &Term, actions: &mut BTreeSet<String>, tests: &mut BTreeSet<String>) {
    match t {
        Term::Act(a) => {
            actions.insert(a.clone());
        }
        Term::Test(b) => {
            tests.insert(b.clone());
        }
        Term::Plus(a, b) | Term::Seq(a, b) => {
            collect_primitives(a, actions, tests);
            collect_primitives(b, actions, tests);
        }
        Term::Star(a) | Term::Not(a) => collect_primitives(a, actions, tests),
        Term::Zero | Term::One | Term::Top | Term::Fail => {}
    }
}

/// Program sugar: the while-language with assume and error statements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Skip,
    Error,
    Assume(Term),
    Action(String),
    Seq(Box<Stmt>, Box<Stmt>),
    Choice(Box<Stmt>, Box<Stmt>),
    If(Term, Box<Stmt>, Box<Stmt>),
    While(Term, Box<Stmt>),
}

/// Translates program sugar into a core term.
///
/// `if b then p else q` becomes `b;p + ~b;q` and `while b do p` becomes
/// `(b;p)*;~b`. `error` becomes `fail` and is only accepted when
/// `fail_mode` is set.
pub fn desugar(stmt: &Stmt, fail_mode: bool) -> Result<Term, SyntaxError> {
    Ok(match stmt {
        Stmt::Skip => Term::One,
        Stmt::Error if fail_mode => Term::Fail,
        Stmt::Error => return Err(SyntaxError::ErrorOutsideFailMode),
        Stmt::Assume(b) => {
            if !b.is_test_only() {
                return Err(SyntaxError::NegationOverNonTest(b.to_string()));
            }
            b.clone()
        }
        Stmt::Action(a) => Term::Act(a.clone()),
        Stmt::Seq(p, q) => desugar(p, fail_mode)?.seq(desugar(q, fail_mode)?),
        Stmt::Choice(p, q) => desugar(p, fail_mode)?.plus(desugar(q, fail_mode)?),
        Stmt::If(b, p, q) => b
            .clone()
            .seq(desugar(p, fail_mode)?)
            .plus(b.clone().not().seq(desugar(q, fail_mode)?)),
        Stmt::While(b, p) => b.clone().seq(desugar(p, fail_mode)?).star().seq(b.clone().not()),
    })
}

// ---------------------------------------------------------------------------
// Parser

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Zero,
    One,
    Top,
    Fail,
    Ident(String),
    Plus,
    Semi,
    Star,
    Tilde,
    LParen,
    RParen,
}

/// Identifier-level syntax tree, before symbols are resolved.
#[derive(Debug, Clone)]
enum Raw {
    Zero,
    One,
    Top,
    Fail,
    Ident(String),
    Plus(Box<Raw>, Box<Raw>),
    Seq(Box<Raw>, Box<Raw>),
    Star(Box<Raw>),
    Not(Box<Raw>),
}

impl Raw {
    fn resolve(&self, alphabet: &Alphabet) -> Result<Term, SyntaxError> {
        Ok(match self {
            Raw::Zero => Term::Zero,
            Raw::One => Term::One,
            Raw::Top => Term::Top,
            Raw::Fail => Term::Fail,
            Raw::Ident(s) if alphabet.is_action(s) => Term::Act(s.clone()),
            Raw::Ident(s) if alphabet.is_test(s) => Term::Test(s.clone()),
            Raw::Ident(s) => return Err(SyntaxError::Undeclared(s.clone())),
            Raw::Plus(a, b) => a.resolve(alphabet)?.plus(b.resolve(alphabet)?),
            Raw::Seq(a, b) => a.resolve(alphabet)?.seq(b.resolve(alphabet)?),
            Raw::Star(a) => a.resolve(alphabet)?.star(),
            Raw::Not(a) => a.resolve(alphabet)?.not(),
        })
    }

    fn collect_idents(&self, as_test: bool, all: &mut BTreeSet<String>, tests: &mut BTreeSet<String>) {
        match self {
            Raw::Ident(s) => {
                all.insert(s.clone());
                if as_test {
                    tests.insert(s.clone());
                }
            }
            Raw::Plus(a, b) | Raw::Seq(a, b) => {
                a.collect_idents(as_test, all, tests);
                b.collect_idents(as_test, all, tests);
            }
            Raw::Star(a) => a.collect_idents(as_test, all, tests),
            Raw::Not(a) => a.collect_idents(true, all, tests),
            Raw::Zero | Raw::One | Raw::Top | Raw::Fail => {}
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, SyntaxError> {
        let mut toks = Vec::new();
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let start = i;
            let tok = match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    i += 1;
                    continue;
                }
                b'+' => Tok::Plus,
                b';' => Tok::Semi,
                b'*' => Tok::Star,
                b'~' => Tok::Tilde,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'0' => Tok::Zero,
                b'1' => Tok::One,
                b'a'..=b'z' => {
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    let word = &text[start..i];
                    let tok = match word {
                        "top" => Tok::Top,
                        "fail" => Tok::Fail,
                        "ok" | "er" => {
                            return Err(SyntaxError::Parse {
                                pos: start,
                                msg: format!("`{word}` is reserved"),
                            })
                        }
                        _ => Tok::Ident(word.to_string()),
                    };
                    toks.push((tok, start));
                    continue;
                }
                _ => {
                    let ch = text[i..].chars().next().unwrap_or('?');
                    return Err(SyntaxError::Parse { pos: i, msg: format!("unexpected character `{ch}`") });
                }
            };
            i += 1;
            toks.push((tok, start));
        }
        Ok(Parser { toks, pos: 0, end: text.len() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError::Parse { pos: self.offset(), msg: msg.into() })
    }

    fn parse_all(mut self) -> Result<Raw, SyntaxError> {
        let t = self.sum()?;
        if self.peek().is_some() {
            return self.error("unexpected trailing input");
        }
        Ok(t)
    }

    fn sum(&mut self) -> Result<Raw, SyntaxError> {
        let mut lhs = self.seq()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            let rhs = self.seq()?;
            lhs = Raw::Plus(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn seq(&mut self) -> Result<Raw, SyntaxError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Raw::Seq(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Raw, SyntaxError> {
        if self.peek() == Some(&Tok::Tilde) {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Raw::Not(Box::new(inner)));
        }
        let mut t = self.atom()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            t = Raw::Star(Box::new(t));
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Raw, SyntaxError> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.error("unexpected end of input"),
        };
        self.pos += 1;
        Ok(match tok {
            Tok::Zero => Raw::Zero,
            Tok::One => Raw::One,
            Tok::Top => Raw::Top,
            Tok::Fail => Raw::Fail,
            Tok::Ident(s) => Raw::Ident(s),
            Tok::LParen => {
                let inner = self.sum()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.error("expected `)`");
                }
                self.pos += 1;
                inner
            }
            _ => {
                self.pos -= 1;
                return self.error("expected a term");
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab(actions: &[&str], tests: &[&str]) -> Alphabet {
        Alphabet::new(actions.iter().copied(), tests.iter().copied()).unwrap()
    }

    #[test]
    fn parses_guarded_choice() {
        let a = ab(&["p", "q"], &["b"]);
        let t = parse_term("b;p + ~b;q", &a).unwrap();
        let expected = Term::test("b")
            .seq(Term::act("p"))
            .plus(Term::test("b").not().seq(Term::act("q")));
        assert_eq!(t, expected);
    }

    #[test]
    fn parses_top_prefix() {
        let a = ab(&["p"], &["b"]);
        let t = parse_term("top;b;p", &a).unwrap();
        assert_eq!(t, Term::Top.seq(Term::test("b")).seq(Term::act("p")));
        assert_eq!(t.kind(), TermKind::TopKat);
    }

    #[test]
    fn rejects_negated_action() {
        let a = ab(&["p"], &[]);
        assert!(matches!(parse_term("~p", &a), Err(SyntaxError::NegationOverNonTest(_))));
        assert!(matches!(parse_term("~(top)", &a), Err(SyntaxError::NegationOverNonTest(_))));
    }

    #[test]
    fn rejects_undeclared_and_modes() {
        let a = ab(&["p"], &["b"]);
        assert_eq!(parse_term("p;x", &a), Err(SyntaxError::Undeclared("x".into())));
        assert!(matches!(
            parse_term_as("top;p", &a, TermKind::Kat),
            Err(SyntaxError::Disallowed { feature: "top", .. })
        ));
        assert!(matches!(
            parse_term_as("p;fail", &a, TermKind::TopKat),
            Err(SyntaxError::Disallowed { feature: "fail", .. })
        ));
        assert!(matches!(parse_term("b*", &a), Err(SyntaxError::StarOverTest(_))));
        assert!(parse_term("1*", &a).is_ok());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let a = ab(&["p"], &[]);
        assert_eq!(
            parse_term("p + )", &a),
            Err(SyntaxError::Parse { pos: 4, msg: "expected a term".into() })
        );
        assert!(matches!(parse_term("(p", &a), Err(SyntaxError::Parse { pos: 2, .. })));
        assert!(matches!(parse_term("p ok", &a), Err(SyntaxError::Parse { pos: 2, .. })));
        assert!(matches!(parse_term("", &a), Err(SyntaxError::Parse { pos: 0, .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        let a = ab(&["p", "q", "r"], &["b"]);
        let t = parse_term("p;q;r + p*", &a).unwrap();
        let expected = Term::act("p")
            .seq(Term::act("q"))
            .seq(Term::act("r"))
            .plus(Term::act("p").star());
        assert_eq!(t, expected);
        // star binds tighter than negation
        assert_eq!(
            parse_term("~p*", &a),
            Err(SyntaxError::NegationOverNonTest(Term::act("p").star().to_string()))
        );
    }

    #[test]
    fn canonical_printing() {
        let t = Term::test("b").seq(Term::act("p")).star();
        assert_eq!(print_term(&t), "((b;p))*");
        assert_eq!(print_term(&Term::Top), "top");
        assert_eq!(print_term(&Term::Fail), "fail");
    }

    #[test]
    fn pretty_printing_roundtrips() {
        let a = ab(&["p", "q"], &["b", "c"]);
        for text in ["b;p + ~b;q", "(p + q)*;~(b;c)", "top;(p;q)*", "~~b", "(~b)*;p", "p;(q;p)"] {
            let t = parse_term(text, &a);
            let t = match t {
                Ok(t) => t,
                Err(SyntaxError::StarOverTest(_)) => continue,
                Err(e) => panic!("{text}: {e}"),
            };
            assert_eq!(parse_term(&t.to_string(), &a).unwrap(), t, "{text}");
        }
    }

    #[test]
    fn desugars_loops_and_conditionals() {
        let w = Stmt::While(Term::test("b"), Box::new(Stmt::Action("inc".into())));
        assert_eq!(
            desugar(&w, false).unwrap(),
            Term::test("b").seq(Term::act("inc")).star().seq(Term::test("b").not())
        );
        let ite = Stmt::If(Term::test("b"), Box::new(Stmt::Skip), Box::new(Stmt::Action("neg".into())));
        assert_eq!(
            desugar(&ite, false).unwrap(),
            Term::test("b").seq(Term::One).plus(Term::test("b").not().seq(Term::act("neg")))
        );
        assert_eq!(desugar(&Stmt::Skip, false).unwrap(), Term::One);
        assert_eq!(desugar(&Stmt::Error, false), Err(SyntaxError::ErrorOutsideFailMode));
        assert_eq!(desugar(&Stmt::Error, true).unwrap(), Term::Fail);
    }

    #[test]
    fn primitives_of_terms() {
        let a = ab(&["p", "q"], &["b"]);
        let (acts, tests) = occurring_primitives(&parse_term("top;b;p", &a).unwrap());
        assert_eq!(acts, BTreeSet::from(["p".to_string()]));
        assert_eq!(tests, BTreeSet::from(["b".to_string()]));
        let (acts, tests) = occurring_primitives(&Term::Zero);
        assert!(acts.is_empty() && tests.is_empty());
        let (acts, _) = occurring_primitives(&parse_term("b;p + ~b;q", &a).unwrap());
        assert_eq!(acts.len(), 2);
    }

    #[test]
    fn alphabet_rules() {
        assert!(matches!(Alphabet::new(["p"], ["p"]), Err(SyntaxError::NotDisjoint(_))));
        assert!(matches!(Alphabet::new(["p", "p"], Vec::<String>::new()), Err(SyntaxError::Duplicate(_))));
        assert!(matches!(Alphabet::new(["top"], Vec::<String>::new()), Err(SyntaxError::InvalidIdentifier(_))));
        assert!(matches!(Alphabet::new(["P"], Vec::<String>::new()), Err(SyntaxError::InvalidIdentifier(_))));
        assert!(matches!(
            Alphabet::with_cap(Vec::<String>::new(), ["a", "b", "c"], 2),
            Err(SyntaxError::TooManyTests { count: 3, cap: 2 })
        ));
    }

    #[test]
    fn header_and_inference() {
        let (a, rest) = Alphabet::parse_header("# demo\nactions: p q\ntests: a b\np;a\n").unwrap();
        assert_eq!(a.actions(), ["p", "q"]);
        assert_eq!(a.tests(), ["a", "b"]);
        assert_eq!(rest, "p;a\n");
        let a = Alphabet::infer(&["b;1 + ~b;q"], &["c"]).unwrap();
        assert_eq!(a.actions(), ["q"]);
        assert_eq!(a.tests(), ["b", "c"]);
    }
}
