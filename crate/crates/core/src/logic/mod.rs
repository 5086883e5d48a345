//! Hoare and incorrectness triples: text syntax, equational encodings,
//! equational and model-based checking, and the rule catalog.

mod rules;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::atoms::Side;
use crate::engine::{decide_equal, decide_leq, EngineError, Witness};
use crate::failtopkat::{eval_fail, split, ErrorCode};
use crate::relmodels::{check_triple_semantic, eval_term, eval_test_set, ModelError, Rel, RelationalModel, TripleMode};
use crate::syntax::{parse_term, validate, Alphabet, SyntaxError, Term, TermKind};

pub use rules::{
    catalog, check_rule, rules_of_figure, Chain, ModelSweep, Premise, Report, Rule, RuleVariant, Strategy, strategy_for, Violation, CHAIN_LENGTH,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("malformed triple: {0}")]
    Malformed(String),
    #[error("rule `{0}` has premises; check it with the model strategy")]
    PremisedRule(String),
    #[error("form {form} does not apply to {style} triples")]
    FormMismatch { form: Form, style: Style },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Style {
    Hoare,
    Incorrectness,
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Style::Hoare => "hoare",
            Style::Incorrectness => "incorrectness",
        })
    }
}

/// A triple `[pre] prog [code: post]` or `{pre} prog {post}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub pre: Term,
    pub prog: Term,
    pub code: ErrorCode,
    pub post: Term,
    pub style: Style,
}

impl Triple {
    pub fn incorrectness(pre: Term, prog: Term, code: ErrorCode, post: Term) -> Triple {
        Triple { pre, prog, code, post, style: Style::Incorrectness }
    }

    pub fn hoare(pre: Term, prog: Term, post: Term) -> Triple {
        Triple { pre, prog, code: ErrorCode::Ok, post, style: Style::Hoare }
    }

    /// Checks the shape constraints: test-only conditions, no error code
    /// or fail in Hoare triples.
    pub fn check_shape(&self) -> Result<(), LogicError> {
        for (what, t) in [("precondition", &self.pre), ("postcondition", &self.post)] {
            if !t.is_test_only() {
                return Err(LogicError::Malformed(format!("{what} `{t}` is not a test")));
            }
        }
        if self.style == Style::Hoare {
            if self.code != ErrorCode::Ok {
                return Err(LogicError::Malformed("Hoare triples have no error code".into()));
            }
            if self.prog.contains_fail() {
                return Err(LogicError::Malformed("Hoare triples cannot contain fail".into()));
            }
        }
        Ok(())
    }

    pub fn validate(&self, alphabet: &Alphabet) -> Result<(), LogicError> {
        self.check_shape()?;
        for t in [&self.pre, &self.prog, &self.post] {
            validate(t, alphabet, TermKind::FailTopKat)?;
        }
        Ok(())
    }

    /// Applies `f` to every term of the triple.
    pub fn map_terms(&self, f: &dyn Fn(&Term) -> Term) -> Triple {
        Triple { pre: f(&self.pre), prog: f(&self.prog), code: self.code, post: f(&self.post), style: self.style }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.style {
            Style::Hoare => write!(f, "{{{}}} {} {{{}}}", self.pre, self.prog, self.post),
            Style::Incorrectness => write!(f, "[{}] {} [{}: {}]", self.pre, self.prog, self.code, self.post),
        }
    }
}

/// The three textual parts of a triple, before term parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleText<'a> {
    pub pre: &'a str,
    pub prog: &'a str,
    pub post: &'a str,
    pub code: ErrorCode,
    pub style: Style,
}

/// Splits triple text into its parts.
pub fn split_triple_text(text: &str) -> Result<TripleText<'_>, LogicError> {
    let text = text.trim();
    let malformed = |msg: &str| LogicError::Malformed(msg.to_string());
    let (open, close, style) = match text.chars().next() {
        Some('[') => ('[', ']', Style::Incorrectness),
        Some('{') => ('{', '}', Style::Hoare),
        _ => return Err(malformed("expected `[pre] prog [ok: post]` or `{pre} prog {post}`")),
    };
    let pre_end = text.find(close).ok_or_else(|| malformed("unterminated precondition"))?;
    let post_start = text.rfind(open).ok_or_else(|| malformed("missing postcondition"))?;
    if post_start <= pre_end || !text.ends_with(close) {
        return Err(malformed("missing postcondition"));
    }
    let pre = &text[1..pre_end];
    let prog = text[pre_end + 1..post_start].trim();
    let mut post = text[post_start + 1..text.len() - 1].trim();
    let mut code = ErrorCode::Ok;
    if style == Style::Incorrectness {
        let (tag, rest) = post.split_once(':').ok_or_else(|| malformed("postcondition needs `ok:` or `er:`"))?;
        code = match tag.trim() {
            "ok" => ErrorCode::Ok,
            "er" => ErrorCode::Er,
            other => return Err(LogicError::Malformed(format!("unknown error code `{other}`"))),
        };
        post = rest.trim();
    }
    if prog.is_empty() {
        return Err(malformed("empty program"));
    }
    Ok(TripleText { pre: pre.trim(), prog, post, code, style })
}

/// Parses `[pre] prog [ok: post]`, `[pre] prog [er: post]` or
/// `{pre} prog {post}`.
pub fn parse_triple(text: &str, alphabet: &Alphabet) -> Result<Triple, LogicError> {
    let parts = split_triple_text(text)?;
    let triple = Triple {
        pre: parse_term(parts.pre, alphabet)?,
        prog: parse_term(parts.prog, alphabet)?,
        code: parts.code,
        post: parse_term(parts.post, alphabet)?,
        style: parts.style,
    };
    triple.check_shape()?;
    Ok(triple)
}

/// Infers an alphabet from triple text: symbols of the conditions and
/// negated symbols are tests, the rest actions.
pub fn infer_triple_alphabet(text: &str) -> Result<Alphabet, LogicError> {
    let parts = split_triple_text(text)?;
    Ok(Alphabet::infer(&[parts.prog], &[parts.pre, parts.post])?)
}

/// Equational forms of incorrectness triples (`F1`..`F3`) and Hoare triples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    /// `top;b;p ≥ top;c`
    F1,
    /// `top;b;p ≥ c`
    F2,
    /// `top;b;p;c = top;c`
    F3,
    /// `b;p;~c = 0`
    Kozen,
    /// `b;p ≤ top;c`
    TopLeq,
    /// `top;b;p ≤ top;c`
    TopTop,
}

impl Form {
    pub const INCORRECTNESS: [Form; 3] = [Form::F1, Form::F2, Form::F3];
    pub const HOARE: [Form; 3] = [Form::Kozen, Form::TopLeq, Form::TopTop];

    pub fn style(self) -> Style {
        match self {
            Form::F1 | Form::F2 | Form::F3 => Style::Incorrectness,
            _ => Style::Hoare,
        }
    }

    pub fn default_for(style: Style) -> Form {
        match style {
            Style::Incorrectness => Form::F2,
            Style::Hoare => Form::Kozen,
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::F1 => "f1",
            Form::F2 => "f2",
            Form::F3 => "f3",
            Form::Kozen => "kozen",
            Form::TopLeq => "topleq",
            Form::TopTop => "toptop",
        })
    }
}

impl FromStr for Form {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "f1" => Form::F1,
            "f2" => Form::F2,
            "f3" => Form::F3,
            "kozen" => Form::Kozen,
            "topleq" => Form::TopLeq,
            "toptop" => Form::TopTop,
            _ => return Err(format!("unknown form `{s}` (expected f1, f2, f3, kozen, topleq or toptop)")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Leq,
    Geq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "=",
            Relation::Leq => "≤",
            Relation::Geq => "≥",
        })
    }
}

/// An equation or inequality between fail-free terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Encoding {
    pub lhs: Term,
    pub rel: Relation,
    pub rhs: Term,
    /// Set when the left side is one component of a fail term.
    pub component: Option<ErrorCode>,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(code) = self.component {
            write!(f, "{code}: ")?;
        }
        write!(f, "{} {} {}", self.lhs, self.rel, self.rhs)
    }
}

impl Encoding {
    /// Whether the encoding holds in a model.
    pub fn holds_in(&self, m: &RelationalModel) -> Result<bool, ModelError> {
        let l = eval_term(m, &self.lhs)?;
        let r = eval_term(m, &self.rhs)?;
        Ok(match self.rel {
            Relation::Eq => l == r,
            Relation::Leq => l.is_subset(&r),
            Relation::Geq => r.is_subset(&l),
        })
    }
}

/// Encodes an incorrectness triple. When the program may fail, the
/// left-hand `top;pre;prog` is replaced by the component selected by the
/// error code.
pub fn encode_incorrectness(tr: &Triple, form: Form) -> Result<Encoding, LogicError> {
    tr.check_shape()?;
    if tr.style != Style::Incorrectness || form.style() != Style::Incorrectness {
        return Err(LogicError::FormMismatch { form, style: tr.style });
    }
    let reach = Term::Top.seq(tr.pre.clone()).seq(tr.prog.clone());
    let (reach, component) = if tr.prog.contains_fail() || tr.code == ErrorCode::Er {
        (split(&reach).component(tr.code).clone(), Some(tr.code))
    } else {
        (reach, None)
    };
    let c = tr.post.clone();
    Ok(match form {
        Form::F1 => Encoding { lhs: reach, rel: Relation::Geq, rhs: Term::Top.seq(c), component },
        Form::F2 => Encoding { lhs: reach, rel: Relation::Geq, rhs: c, component },
        _ => Encoding { lhs: reach.seq(c.clone()), rel: Relation::Eq, rhs: Term::Top.seq(c), component },
    })
}

/// Encodes a Hoare triple.
pub fn encode_hoare(tr: &Triple, form: Form) -> Result<Encoding, LogicError> {
    tr.check_shape()?;
    if tr.style != Style::Hoare || form.style() != Style::Hoare {
        return Err(LogicError::FormMismatch { form, style: tr.style });
    }
    let (b, p, c) = (tr.pre.clone(), tr.prog.clone(), tr.post.clone());
    Ok(match form {
        Form::Kozen => Encoding { lhs: b.seq(p).seq(c.not()), rel: Relation::Eq, rhs: Term::Zero, component: None },
        Form::TopLeq => Encoding { lhs: b.seq(p), rel: Relation::Leq, rhs: Term::Top.seq(c), component: None },
        _ => Encoding { lhs: Term::Top.seq(b).seq(p), rel: Relation::Leq, rhs: Term::Top.seq(c), component: None },
    })
}

pub fn encode(tr: &Triple, form: Form) -> Result<Encoding, LogicError> {
    match tr.style {
        Style::Incorrectness => encode_incorrectness(tr, form),
        Style::Hoare => encode_hoare(tr, form),
    }
}

/// Outcome of an equational check. `Unproven` means the encoding is not
/// valid in every TopKAT; the witness separates the two guarded-string
/// languages and does not show the triple false in any particular model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TripleVerdict {
    Valid,
    Unproven(Witness),
}

impl TripleVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, TripleVerdict::Valid)
    }
}

/// Decides an encoding with the TopKAT engine.
pub fn decide_encoding(enc: &Encoding, alphabet: &Alphabet) -> Result<TripleVerdict, LogicError> {
    let verdict = match enc.rel {
        Relation::Eq => decide_equal(&enc.lhs, &enc.rhs, alphabet)?,
        Relation::Leq => decide_leq(&enc.lhs, &enc.rhs, alphabet)?,
        Relation::Geq => decide_leq(&enc.rhs, &enc.lhs, alphabet)?,
    };
    Ok(match verdict.witness() {
        None => TripleVerdict::Valid,
        Some(w) => {
            let mut w = w.clone();
            // sides are reported relative to the encoding as written
            if enc.rel == Relation::Geq {
                w.accepted_by = match w.accepted_by {
                    Side::Left => Side::Right,
                    Side::Right => Side::Left,
                };
            }
            TripleVerdict::Unproven(w)
        }
    })
}

/// Checks a triple by deciding its encoding in the given form.
pub fn check_triple_equational(tr: &Triple, form: Form, alphabet: &Alphabet) -> Result<TripleVerdict, LogicError> {
    tr.validate(alphabet)?;
    decide_encoding(&encode(tr, form)?, alphabet)
}

/// Checks a triple against the codomain definition in a model. Programs
/// with fail are evaluated in the pair algebra and the component selected
/// by the error code is used.
pub fn triple_holds_in(m: &RelationalModel, tr: &Triple) -> Result<bool, LogicError> {
    tr.check_shape()?;
    let mode = match tr.style {
        Style::Hoare => TripleMode::Hoare,
        Style::Incorrectness => TripleMode::Incorrectness,
    };
    if !tr.prog.contains_fail() && tr.code == ErrorCode::Ok {
        return Ok(check_triple_semantic(m, &tr.pre, &tr.prog, &tr.post, mode)?);
    }
    let pre = Rel::diagonal(m.states(), eval_test_set(m, &tr.pre)?);
    let post = eval_test_set(m, &tr.post)?;
    let (ok, er) = eval_fail(m, &tr.prog)?;
    let reached = match tr.code {
        ErrorCode::Ok => pre.compose(&ok).codomain(),
        ErrorCode::Er => pre.compose(&er).codomain(),
    };
    Ok(post & !reached == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha() -> Alphabet {
        Alphabet::new(["p", "q"], ["b", "c", "d"]).unwrap()
    }

    fn triple(s: &str) -> Triple {
        parse_triple(s, &alpha()).unwrap()
    }

    #[test]
    fn parses_triples() {
        let t = triple("[b] p [ok: c]");
        assert_eq!(t, Triple::incorrectness(Term::test("b"), Term::act("p"), ErrorCode::Ok, Term::test("c")));
        assert_eq!(t.to_string(), "[b] p [ok: c]");
        let t = triple("[b] fail [er: b]");
        assert_eq!(t.code, ErrorCode::Er);
        let t = triple("{b} b;p + ~b;q {c}");
        assert_eq!(t.style, Style::Hoare);
        assert_eq!(t.to_string(), "{b} b;p + ~b;q {c}");
        assert!(parse_triple("[p] p [ok: c]", &alpha()).is_err());
        assert!(parse_triple("[b] p [c]", &alpha()).is_err());
        assert!(parse_triple("[b] p", &alpha()).is_err());
        let inferred = infer_triple_alphabet("[x] y;z [ok: w]").unwrap();
        assert_eq!(inferred.tests(), ["w", "x"]);
        assert_eq!(inferred.actions(), ["y", "z"]);
    }

    #[test]
    fn encodings() {
        let t = triple("[b] p [ok: c]");
        assert_eq!(encode(&t, Form::F2).unwrap().to_string(), "top;b;p ≥ c");
        assert_eq!(encode(&t, Form::F1).unwrap().to_string(), "top;b;p ≥ top;c");
        assert_eq!(encode(&t, Form::F3).unwrap().to_string(), "top;b;p;c = top;c");
        let t = triple("[b] fail [er: b]");
        let e = encode(&t, Form::F2).unwrap();
        assert_eq!(e.component, Some(ErrorCode::Er));
        assert_eq!(e.lhs, Term::Top.seq(Term::test("b")));
        assert_eq!(e.rhs, Term::test("b"));
        assert!(decide_encoding(&e, &alpha()).unwrap().is_valid());
        let h = triple("{b} p {c}");
        assert_eq!(encode(&h, Form::Kozen).unwrap().to_string(), "b;p;~c = 0");
        assert!(matches!(encode(&h, Form::F1), Err(LogicError::FormMismatch { .. })));
    }

    #[test]
    fn equational_checks() {
        let a = alpha();
        for form in Form::INCORRECTNESS {
            assert!(check_triple_equational(&triple("[b] b;1 + ~b;q [ok: b]"), form, &a).unwrap().is_valid());
            assert!(check_triple_equational(&triple("[1] (b;p)*;~b [ok: ~b]"), form, &a).unwrap().is_valid());
            assert!(check_triple_equational(&triple("[b] p [ok: 0]"), form, &a).unwrap().is_valid());
            assert!(!check_triple_equational(&triple("[b] p [ok: c]"), form, &a).unwrap().is_valid());
        }
        for form in Form::HOARE {
            assert!(check_triple_equational(&triple("{1} (b;p)*;~b {~b}"), form, &a).unwrap().is_valid());
            assert!(check_triple_equational(&triple("{b} 1 {b}"), form, &a).unwrap().is_valid());
            assert!(check_triple_equational(&triple("{b} p {1}"), form, &a).unwrap().is_valid());
        }
    }

    #[test]
    fn semantic_checks() {
        let m = RelationalModel::from_lists(
            2,
            &[("p", &[(0, 1)]), ("q", &[])],
            &[("b", &[0]), ("c", &[1]), ("d", &[])],
            None,
        )
        .unwrap();
        assert!(triple_holds_in(&m, &triple("[b] p [ok: c]")).unwrap());
        assert!(!triple_holds_in(&m, &triple("[b] q [ok: c]")).unwrap());
        assert!(triple_holds_in(&m, &triple("[b] p;fail [er: c]")).unwrap());
        assert!(!triple_holds_in(&m, &triple("[b] p;fail [ok: c]")).unwrap());
        assert!(triple_holds_in(&m, &triple("{b} p {c}")).unwrap());
    }
}
