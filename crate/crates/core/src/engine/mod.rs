//! Decision procedure for KAT and TopKAT equations.
//!
//! Top is eliminated by substituting `(k1 + ... + kn + τ)*` over the actions
//! occurring in the compared terms, after which equality is plain KAT
//! equality over guarded strings, checked by bisimulation of partial
//! derivative automata.

mod derivatives;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::atoms::{Atom, AtomError, GuardedAlphabet, GuardedString, Side};
use crate::syntax::{occurring_primitives, validate, Alphabet, SyntaxError, Term, TermKind, TAU};
use derivatives::Arena;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Atoms(#[from] AtomError),
    #[error("term contains fail; use the failtopkat decision procedures")]
    FailTerm,
    #[error("{count} tests exceed the atom cap of {cap}")]
    CapExceeded { count: usize, cap: usize },
}

/// A term with every top replaced by `(Σ K + τ)*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedTerm {
    pub term: Term,
    pub had_top: bool,
}

/// Replaces each top in `t` with the star of the sum of `joint_actions` and
/// the reserved action [`TAU`].
pub fn reduce_top(t: &Term, joint_actions: &BTreeSet<String>) -> Result<ReducedTerm, EngineError> {
    if t.contains_fail() {
        return Err(EngineError::FailTerm);
    }
    if !t.contains_top() {
        return Ok(ReducedTerm { term: t.clone(), had_top: false });
    }
    let replacement = Term::sum(
        joint_actions
            .iter()
            .map(|a| Term::Act(a.clone()))
            .chain(std::iter::once(Term::Act(TAU.to_string()))),
    )
    .star();
    let term = t.map_leaves(&|leaf| matches!(leaf, Term::Top).then(|| replacement.clone()));
    Ok(ReducedTerm { term, had_top: true })
}

/// Whether the one-atom string `atom` belongs to the reduced term `t`.
pub fn obs(t: &Term, atom: Atom, alphabet: &GuardedAlphabet) -> Result<bool, EngineError> {
    let mut arena = Arena::new(alphabet);
    let id = arena.compile(t)?;
    Ok(arena.obs(id, atom))
}

/// Partial derivatives of the reduced term `t` with respect to the letter
/// `(atom, action)`, as normalized residual terms.
pub fn derive(t: &Term, atom: Atom, action: &str, alphabet: &GuardedAlphabet) -> Result<Vec<Term>, EngineError> {
    let action = alphabet
        .action_id(action)
        .ok_or_else(|| AtomError::UnknownSymbol(action.to_string()))?;
    let mut arena = Arena::new(alphabet);
    let id = arena.compile(t)?;
    Ok(arena.derive(id, atom, action).into_iter().map(|r| arena.to_term(r)).collect())
}

/// A guarded string in exactly one of two languages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub string: GuardedString,
    pub accepted_by: Side,
    /// The letters the string is written over (joint actions, possibly τ).
    pub alphabet: GuardedAlphabet,
}

impl Witness {
    pub fn render(&self) -> String {
        self.string.display(&self.alphabet).to_string()
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.accepted_by {
            Side::Left => "left",
            Side::Right => "right",
        };
        write!(f, "{} (accepted by the {side} term only)", self.render())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    NotEqual(Witness),
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::Equal)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Equal => None,
            Verdict::NotEqual(w) => Some(w),
        }
    }
}

/// Counters from one decision run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub pairs_expanded: usize,
    pub state_sets: usize,
    pub atoms: usize,
    pub letters: usize,
}

/// The reduced pair of terms that a decision actually compares, together
/// with the guarded alphabet they are read over.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub left: ReducedTerm,
    pub right: ReducedTerm,
    pub alphabet: GuardedAlphabet,
}

/// Validates both terms, computes the joint action set and eliminates top.
pub fn reduce_pair(t1: &Term, t2: &Term, alphabet: &Alphabet) -> Result<Reduction, EngineError> {
    if t1.contains_fail() || t2.contains_fail() {
        return Err(EngineError::FailTerm);
    }
    let count = alphabet.tests().len();
    if count > alphabet.test_cap() {
        return Err(EngineError::CapExceeded { count, cap: alphabet.test_cap() });
    }
    validate(t1, alphabet, TermKind::TopKat)?;
    validate(t2, alphabet, TermKind::TopKat)?;
    let (mut joint, _) = occurring_primitives(t1);
    joint.extend(occurring_primitives(t2).0);
    let left = reduce_top(t1, &joint)?;
    let right = reduce_top(t2, &joint)?;
    let mut actions: Vec<String> = joint.into_iter().collect();
    if left.had_top || right.had_top {
        actions.push(TAU.to_string());
    }
    let galpha = GuardedAlphabet::new(actions, alphabet.tests().to_vec());
    Ok(Reduction { left, right, alphabet: galpha })
}

/// Decides `t1 = t2` in all TopKATs.
pub fn decide_equal(t1: &Term, t2: &Term, alphabet: &Alphabet) -> Result<Verdict, EngineError> {
    decide_equal_with_stats(t1, t2, alphabet).map(|(v, _)| v)
}

pub fn decide_equal_with_stats(t1: &Term, t2: &Term, alphabet: &Alphabet) -> Result<(Verdict, Stats), EngineError> {
    let reduction = reduce_pair(t1, t2, alphabet)?;
    let galpha = &reduction.alphabet;
    let mut arena = Arena::new(galpha);
    let l = arena.compile(&reduction.left.term)?;
    let r = arena.compile(&reduction.right.term)?;
    let ls = arena.state_set(vec![l]);
    let rs = arena.state_set(vec![r]);
    let (diff, pairs_expanded) = arena.bisimulate(ls, rs);
    let stats = Stats {
        pairs_expanded,
        state_sets: arena.set_count(),
        atoms: galpha.atom_count(),
        letters: galpha.atom_count() * galpha.actions().len(),
    };
    let verdict = match diff {
        None => Verdict::Equal,
        Some((string, accepted_by)) => Verdict::NotEqual(Witness { string, accepted_by, alphabet: galpha.clone() }),
    };
    Ok((verdict, stats))
}

/// Decides `t1 ≤ t2` in all TopKATs, as `t1 + t2 = t2`. A witness is a string
/// of the left term missing from the right one.
pub fn decide_leq(t1: &Term, t2: &Term, alphabet: &Alphabet) -> Result<Verdict, EngineError> {
    decide_equal(&t1.clone().plus(t2.clone()), t2, alphabet)
}
