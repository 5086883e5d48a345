//! Terms with `fail`, read through the pair construction: every element is
//! a pair `(ok, er)` of fail-free elements with
//!
//! ```text
//! (p, p')(q, q') = (pq, p' + pq')      (p, p')* = (p*, p*p')
//! (p, p') + (q, q') = (p + q, p' + q')  fail = (0, 1)   top = (top, 0)
//! ```
//!
//! Equality of fail terms is decided componentwise with the TopKAT engine,
//! so a verdict speaks about validity in every model built this way from a
//! TopKAT, not about derivability from a list of axioms.

use std::fmt;

use crate::engine::{decide_equal, decide_leq, EngineError, Verdict, Witness};
use crate::relmodels::{eval_term, ModelError, Rel, RelationalModel};
use crate::syntax::{validate, Alphabet, Term, TermKind};

/// The termination status a triple talks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErrorCode {
    Ok,
    Er,
}

impl ErrorCode {
    pub const ALL: [ErrorCode; 2] = [ErrorCode::Ok, ErrorCode::Er];
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorCode::Ok => "ok",
            ErrorCode::Er => "er",
        })
    }
}

/// The normal and the erroneous component of a fail term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SplitPair {
    pub ok: Term,
    pub er: Term,
}

impl SplitPair {
    pub fn component(&self, code: ErrorCode) -> &Term {
        match code {
            ErrorCode::Ok => &self.ok,
            ErrorCode::Er => &self.er,
        }
    }
}

fn plus(a: Term, b: Term) -> Term {
    match (a, b) {
        (Term::Zero, b) => b,
        (a, Term::Zero) => a,
        (a, b) => a.plus(b),
    }
}

fn seq(a: Term, b: Term) -> Term {
    match (a, b) {
        (Term::Zero, _) | (_, Term::Zero) => Term::Zero,
        (Term::One, b) => b,
        (a, Term::One) => a,
        (a, b) => a.seq(b),
    }
}

// `b* = 1` for every test; a fail-free body can become test-only once its
// fail branches are dropped, and stars over compound tests are not terms
fn star(a: Term) -> Term {
    if a.is_test_only() {
        Term::One
    } else {
        a.star()
    }
}

/// Splits a fail term into its component pair, simplifying only with the
/// unit and annihilator laws and `b* = 1` for tests.
pub fn split(t: &Term) -> SplitPair {
    match t {
        Term::Fail => SplitPair { ok: Term::Zero, er: Term::One },
        Term::Plus(a, b) => {
            let (a, b) = (split(a), split(b));
            SplitPair { ok: plus(a.ok, b.ok), er: plus(a.er, b.er) }
        }
        Term::Seq(a, b) => {
            let (a, b) = (split(a), split(b));
            SplitPair { ok: seq(a.ok.clone(), b.ok), er: plus(a.er, seq(a.ok, b.er)) }
        }
        Term::Star(a) => {
            let a = split(a);
            let s = star(a.ok);
            SplitPair { ok: s.clone(), er: seq(s, a.er) }
        }
        // negation only applies to tests, which are fail-free
        other => SplitPair { ok: other.clone(), er: Term::Zero },
    }
}

/// Evaluates a fail term directly in the pair algebra over `m`.
pub fn eval_fail(m: &RelationalModel, t: &Term) -> Result<(Rel, Rel), ModelError> {
    let n = m.states();
    Ok(match t {
        Term::Fail => (Rel::empty(n), Rel::identity(n)),
        Term::Plus(a, b) => {
            let ((p, pe), (q, qe)) = (eval_fail(m, a)?, eval_fail(m, b)?);
            (p.union(&q), pe.union(&qe))
        }
        Term::Seq(a, b) => {
            let ((p, pe), (q, qe)) = (eval_fail(m, a)?, eval_fail(m, b)?);
            (p.compose(&q), pe.union(&p.compose(&qe)))
        }
        Term::Star(a) => {
            let (p, pe) = eval_fail(m, a)?;
            let s = p.star();
            let er = s.compose(&pe);
            (s, er)
        }
        other => (eval_term(m, other)?, Rel::empty(n)),
    })
}

/// Componentwise verdicts for a fail equation or inequality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailVerdict {
    pub ok: Verdict,
    pub er: Verdict,
}

impl FailVerdict {
    pub fn is_equal(&self) -> bool {
        self.ok.is_equal() && self.er.is_equal()
    }

    /// The first failing component and its witness.
    pub fn witness(&self) -> Option<(ErrorCode, &Witness)> {
        self.ok
            .witness()
            .map(|w| (ErrorCode::Ok, w))
            .or_else(|| self.er.witness().map(|w| (ErrorCode::Er, w)))
    }

    /// The tagged witness text, `ok: ...` or `er: ...`.
    pub fn render_witness(&self) -> Option<String> {
        self.witness().map(|(code, w)| format!("{code}: {}", w.render()))
    }
}

fn components(t1: &Term, t2: &Term, alphabet: &Alphabet) -> Result<(SplitPair, SplitPair), EngineError> {
    validate(t1, alphabet, TermKind::FailTopKat)?;
    validate(t2, alphabet, TermKind::FailTopKat)?;
    Ok((split(t1), split(t2)))
}

/// Decides `t1 = t2` in every pair model over a TopKAT.
pub fn decide_fail_equal(t1: &Term, t2: &Term, alphabet: &Alphabet) -> Result<FailVerdict, EngineError> {
    let (s1, s2) = components(t1, t2, alphabet)?;
    Ok(FailVerdict { ok: decide_equal(&s1.ok, &s2.ok, alphabet)?, er: decide_equal(&s1.er, &s2.er, alphabet)? })
}

/// Decides `t1 ≤ t2` in every pair model over a TopKAT; the order is
/// componentwise.
pub fn decide_fail_leq(t1: &Term, t2: &Term, alphabet: &Alphabet) -> Result<FailVerdict, EngineError> {
    let (s1, s2) = components(t1, t2, alphabet)?;
    Ok(FailVerdict { ok: decide_leq(&s1.ok, &s2.ok, alphabet)?, er: decide_leq(&s1.er, &s2.er, alphabet)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn alpha() -> Alphabet {
        Alphabet::new(["p", "q"], ["b"]).unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s, &alpha()).unwrap()
    }

    #[test]
    fn split_examples() {
        assert_eq!(split(&Term::Fail), SplitPair { ok: Term::Zero, er: Term::One });
        assert_eq!(split(&t("p;fail;q")), SplitPair { ok: Term::Zero, er: t("p") });
        assert_eq!(split(&Term::Fail.star()), SplitPair { ok: Term::One, er: Term::One });
        assert_eq!(split(&t("p;q")).er, Term::Zero);
        assert_eq!(split(&t("(fail + b)*")), SplitPair { ok: Term::One, er: Term::One });
    }

    #[test]
    fn eval_examples() {
        let m = RelationalModel::from_lists(2, &[("p", &[(0, 1)]), ("q", &[])], &[("b", &[0])], None).unwrap();
        assert_eq!(eval_fail(&m, &Term::Fail).unwrap(), (Rel::empty(2), Rel::identity(2)));
        assert_eq!(eval_fail(&m, &Term::One).unwrap(), (Rel::identity(2), Rel::empty(2)));
        let (ok, er) = eval_fail(&m, &t("p;fail")).unwrap();
        assert!(ok.is_empty());
        assert_eq!(er, m.action("p").unwrap().clone());
    }

    #[test]
    fn decisions() {
        let a = alpha();
        assert!(decide_fail_equal(&t("fail;p"), &t("fail"), &a).unwrap().is_equal());
        assert!(decide_fail_equal(&t("0;p"), &t("0"), &a).unwrap().is_equal());
        let v = decide_fail_equal(&t("p;fail"), &t("fail"), &a).unwrap();
        assert!(v.ok.is_equal());
        assert_eq!(v.witness().unwrap().0, ErrorCode::Er);
        assert!(v.render_witness().unwrap().starts_with("er: "));
        assert!(!decide_fail_leq(&t("fail"), &t("top"), &a).unwrap().is_equal());
    }
}
