//! Atoms, guarded strings and the bounded guarded-string semantics.
//!
//! This module is the reference semantics the decision procedure is checked
//! against. It deliberately shares no code with [`crate::engine`]:
//!
//! * [`language_up_to`] enumerates every guarded string of bounded length
//!   by structural recursion over the term.
//! * [`accepts`] decides membership of one string by span matching.
//! * [`bounded_difference`] compares two bounded languages through a
//!   Thompson-style automaton and a breadth-first product walk, for bounds
//!   where enumeration would be too large.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::syntax::{Alphabet, Term, TAU};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtomError {
    #[error("{count} tests exceed the atom cap of {cap}")]
    CapExceeded { count: usize, cap: usize },
    #[error("`{0}` is not a test-only term")]
    NotTestOnly(String),
    #[error("symbol `{0}` is not part of the alphabet")]
    UnknownSymbol(String),
    #[error("fail has no guarded-string semantics; split the term first")]
    Fail,
    #[error("bounded language exceeds {0} strings")]
    TooLarge(usize),
}

/// A complete truth assignment to the tests of an alphabet. Bit `i` is the
/// polarity of test `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(pub u32);

impl Atom {
    pub fn holds(self, test_index: usize) -> bool {
        self.0 >> test_index & 1 == 1
    }
}

/// Index into [`GuardedAlphabet::actions`].
pub type ActionId = u16;

/// The letters guarded strings are built from: ordered actions (possibly
/// including [`TAU`]) and ordered tests.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GuardedAlphabet {
    actions: Vec<String>,
    tests: Vec<String>,
}

impl GuardedAlphabet {
    pub fn new(actions: Vec<String>, tests: Vec<String>) -> Self {
        GuardedAlphabet { actions, tests }
    }

    /// Actions and tests of `alphabet`, with [`TAU`] appended to the actions
    /// when `with_tau` is set.
    pub fn from_alphabet(alphabet: &Alphabet, with_tau: bool) -> Self {
        let mut actions = alphabet.actions().to_vec();
        if with_tau {
            actions.push(TAU.to_string());
        }
        GuardedAlphabet { actions, tests: alphabet.tests().to_vec() }
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn tests(&self) -> &[String] {
        &self.tests
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a == name).map(|i| i as ActionId)
    }

    pub fn test_index(&self, name: &str) -> Option<usize> {
        self.tests.iter().position(|b| b == name)
    }

    pub fn atom_count(&self) -> usize {
        1usize << self.tests.len()
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> {
        (0..self.atom_count() as u32).map(Atom)
    }

    /// Renders an atom as comma-joined signed literals, `1` when there are
    /// no tests.
    pub fn render_atom(&self, atom: Atom) -> String {
        if self.tests.is_empty() {
            return "1".to_string();
        }
        self.tests
            .iter()
            .enumerate()
            .map(|(i, b)| if atom.holds(i) { b.clone() } else { format!("~{b}") })
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Renders an action; [`TAU`] prints as `top`.
    pub fn render_action(&self, id: ActionId) -> &str {
        match self.actions[id as usize].as_str() {
            TAU => "top",
            a => a,
        }
    }
}

/// All `2^|B|` atoms in increasing bit order.
pub fn enumerate_atoms(alphabet: &Alphabet) -> Result<Vec<Atom>, AtomError> {
    let count = alphabet.tests().len();
    if count > alphabet.test_cap() {
        return Err(AtomError::CapExceeded { count, cap: alphabet.test_cap() });
    }
    Ok((0..1u32 << count).map(Atom).collect())
}

/// Evaluates a test-only term under an atom.
pub fn eval_test(t: &Term, atom: Atom, alphabet: &GuardedAlphabet) -> Result<bool, AtomError> {
    Ok(match t {
        Term::Zero => false,
        Term::One => true,
        Term::Test(b) => {
            let i = alphabet.test_index(b).ok_or_else(|| AtomError::UnknownSymbol(b.clone()))?;
            atom.holds(i)
        }
        Term::Not(a) => !eval_test(a, atom, alphabet)?,
        Term::Plus(a, b) => eval_test(a, atom, alphabet)? | eval_test(b, atom, alphabet)?,
        Term::Seq(a, b) => eval_test(a, atom, alphabet)? & eval_test(b, atom, alphabet)?,
        other => return Err(AtomError::NotTestOnly(other.to_string())),
    })
}

/// A guarded string `α0 p1 α1 … pn αn`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GuardedString {
    pub head: Atom,
    pub steps: Vec<(ActionId, Atom)>,
}

impl GuardedString {
    pub fn atom(head: Atom) -> Self {
        GuardedString { head, steps: Vec::new() }
    }

    /// Number of actions.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn first(&self) -> Atom {
        self.head
    }

    pub fn last(&self) -> Atom {
        self.steps.last().map_or(self.head, |&(_, a)| a)
    }

    /// The atom before action `i` (0-based) or the final atom for `i == len`.
    pub fn atom_at(&self, i: usize) -> Atom {
        if i == 0 {
            self.head
        } else {
            self.steps[i - 1].1
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a GuardedAlphabet) -> DisplayGuarded<'a> {
        DisplayGuarded { string: self, alphabet }
    }
}

pub struct DisplayGuarded<'a> {
    string: &'a GuardedString,
    alphabet: &'a GuardedAlphabet,
}

impl fmt::Display for DisplayGuarded<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.alphabet.render_atom(self.string.head))?;
        for &(a, atom) in &self.string.steps {
            write!(f, " {} {}", self.alphabet.render_action(a), self.alphabet.render_atom(atom))?;
        }
        Ok(())
    }
}

/// Coalesced product: fuses `x` and `y` on a shared boundary atom.
pub fn coalesce(x: &GuardedString, y: &GuardedString) -> Option<GuardedString> {
    if x.last() != y.first() {
        return None;
    }
    let mut steps = Vec::with_capacity(x.len() + y.len());
    steps.extend_from_slice(&x.steps);
    steps.extend_from_slice(&y.steps);
    Some(GuardedString { head: x.head, steps })
}

/// How `top` is read by the bounded semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopReading {
    /// `top` is the primitive action [`TAU`]; this is the plain KAT language
    /// of a term over the extended alphabet.
    AsAction,
    /// `top` denotes every guarded string over the alphabet's actions: the
    /// standard interpretation of a TopKAT term.
    Full,
}

pub type Language = HashSet<GuardedString>;

/// Refuses to build bounded languages with more strings than this.
pub const LANGUAGE_LIMIT: usize = 20_000_000;

/// Every string of the term's language with at most `max_actions` actions.
///
/// `Top` is read as the primitive action [`TAU`], which must then be one of
/// the alphabet's actions.
pub fn language_up_to(t: &Term, alphabet: &GuardedAlphabet, max_actions: usize) -> Result<Language, AtomError> {
    bounded_language(t, alphabet, max_actions, TopReading::AsAction)
}

/// Bounded language under an explicit reading of `top`.
pub fn bounded_language(
    t: &Term,
    alphabet: &GuardedAlphabet,
    max_actions: usize,
    top: TopReading,
) -> Result<Language, AtomError> {
    Enumerator { alphabet, bound: max_actions, top }.lang(t)
}

struct Enumerator<'a> {
    alphabet: &'a GuardedAlphabet,
    bound: usize,
    top: TopReading,
}

impl Enumerator<'_> {
    fn atoms_where(&self, t: &Term) -> Result<Language, AtomError> {
        let mut out = Language::new();
        for atom in self.alphabet.atoms() {
            if eval_test(t, atom, self.alphabet)? {
                out.insert(GuardedString::atom(atom));
            }
        }
        Ok(out)
    }

    fn action(&self, id: ActionId) -> Language {
        let mut out = Language::new();
        if self.bound == 0 {
            return out;
        }
        for a in self.alphabet.atoms() {
            for b in self.alphabet.atoms() {
                out.insert(GuardedString { head: a, steps: vec![(id, b)] });
            }
        }
        out
    }

    fn lang(&self, t: &Term) -> Result<Language, AtomError> {
        if t.is_test_only() {
            return self.atoms_where(t);
        }
        match t {
            Term::Fail => Err(AtomError::Fail),
            Term::Act(a) => {
                let id = self.alphabet.action_id(a).ok_or_else(|| AtomError::UnknownSymbol(a.clone()))?;
                Ok(self.action(id))
            }
            Term::Top => match self.top {
                TopReading::AsAction => {
                    let id = self.alphabet.action_id(TAU).ok_or_else(|| AtomError::UnknownSymbol(TAU.into()))?;
                    Ok(self.action(id))
                }
                TopReading::Full => self.everything(),
            },
            Term::Plus(a, b) => {
                let mut l = self.lang(a)?;
                l.extend(self.lang(b)?);
                Ok(l)
            }
            Term::Seq(a, b) => {
                let l = self.lang(a)?;
                let r = self.lang(b)?;
                self.product(&l, &r)
            }
            Term::Star(a) => {
                let body = self.lang(a)?;
                self.star(&body)
            }
            // Not is test-only after validation and handled above.
            other => Err(AtomError::NotTestOnly(other.to_string())),
        }
    }

    fn everything(&self) -> Result<Language, AtomError> {
        let mut all = Language::new();
        let mut frontier: Vec<GuardedString> = self.alphabet.atoms().map(GuardedString::atom).collect();
        all.extend(frontier.iter().cloned());
        for _ in 0..self.bound {
            let mut next = Vec::new();
            for s in &frontier {
                for id in 0..self.alphabet.actions().len() as ActionId {
                    for atom in self.alphabet.atoms() {
                        let mut ext = s.clone();
                        ext.steps.push((id, atom));
                        next.push(ext);
                    }
                }
            }
            if all.len() + next.len() > LANGUAGE_LIMIT {
                return Err(AtomError::TooLarge(LANGUAGE_LIMIT));
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        Ok(all)
    }

    fn product(&self, l: &Language, r: &Language) -> Result<Language, AtomError> {
        // right strings by head atom and length, so only fitting pairs are tried
        let mut by_head: HashMap<(Atom, usize), Vec<&GuardedString>> = HashMap::new();
        for s in r {
            by_head.entry((s.head, s.len())).or_default().push(s);
        }
        let mut out = Language::new();
        for x in l {
            for len in 0..=self.bound.saturating_sub(x.len()) {
                let Some(ys) = by_head.get(&(x.last(), len)) else { continue };
                for y in ys {
                    out.insert(coalesce(x, y).expect("heads match"));
                }
                if out.len() > LANGUAGE_LIMIT {
                    return Err(AtomError::TooLarge(LANGUAGE_LIMIT));
                }
            }
        }
        Ok(out)
    }

    /// `S^0 = atoms`, `S^{k+1} = S ⋄ S^k`, iterated until the bounded
    /// fragment stops growing.
    fn star(&self, body: &Language) -> Result<Language, AtomError> {
        let mut acc: Language = self.alphabet.atoms().map(GuardedString::atom).collect();
        let mut delta = acc.clone();
        while !delta.is_empty() {
            let step = self.product(body, &delta)?;
            delta = step.into_iter().filter(|s| !acc.contains(s)).collect();
            acc.extend(delta.iter().cloned());
        }
        Ok(acc)
    }
}

/// Membership of `w` in the language of `t`, by computing which spans
/// `w[i..j]` the term matches.
pub fn accepts(t: &Term, alphabet: &GuardedAlphabet, w: &GuardedString, top: TopReading) -> Result<bool, AtomError> {
    let spans = Spans::new(w.len() + 1);
    let m = spans.matches(t, alphabet, w, top)?;
    Ok(m.get(0, w.len()))
}

/// Square boolean matrix over string positions.
#[derive(Clone, PartialEq, Eq)]
struct SpanSet {
    n: usize,
    bits: Vec<bool>,
}

impl SpanSet {
    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.n + j] = true;
    }

    fn union(mut self, other: &SpanSet) -> SpanSet {
        for (x, y) in self.bits.iter_mut().zip(&other.bits) {
            *x |= *y;
        }
        self
    }

    fn compose(&self, other: &SpanSet) -> SpanSet {
        let n = self.n;
        let mut out = SpanSet { n, bits: vec![false; n * n] };
        for i in 0..n {
            for k in 0..n {
                if self.get(i, k) {
                    for j in 0..n {
                        if other.get(k, j) {
                            out.set(i, j);
                        }
                    }
                }
            }
        }
        out
    }
}

struct Spans {
    n: usize,
}

impl Spans {
    fn new(n: usize) -> Self {
        Spans { n }
    }

    fn empty(&self) -> SpanSet {
        SpanSet { n: self.n, bits: vec![false; self.n * self.n] }
    }

    fn matches(&self, t: &Term, alphabet: &GuardedAlphabet, w: &GuardedString, top: TopReading) -> Result<SpanSet, AtomError> {
        let mut out = self.empty();
        if t.is_test_only() {
            for i in 0..self.n {
                if eval_test(t, w.atom_at(i), alphabet)? {
                    out.set(i, i);
                }
            }
            return Ok(out);
        }
        match t {
            Term::Fail => return Err(AtomError::Fail),
            Term::Act(a) => {
                let id = alphabet.action_id(a).ok_or_else(|| AtomError::UnknownSymbol(a.clone()))?;
                for (i, &(b, _)) in w.steps.iter().enumerate() {
                    if b == id {
                        out.set(i, i + 1);
                    }
                }
            }
            Term::Top => match top {
                TopReading::AsAction => {
                    let tau = Term::Act(TAU.to_string());
                    return self.matches(&tau, alphabet, w, top);
                }
                TopReading::Full => {
                    for i in 0..self.n {
                        for j in i..self.n {
                            out.set(i, j);
                        }
                    }
                }
            },
            Term::Plus(a, b) => {
                out = self.matches(a, alphabet, w, top)?.union(&self.matches(b, alphabet, w, top)?);
            }
            Term::Seq(a, b) => {
                out = self.matches(a, alphabet, w, top)?.compose(&self.matches(b, alphabet, w, top)?);
            }
            Term::Star(a) => {
                let body = self.matches(a, alphabet, w, top)?;
                for i in 0..self.n {
                    out.set(i, i);
                }
                loop {
                    let next = out.clone().union(&out.compose(&body));
                    if next == out {
                        break;
                    }
                    out = next;
                }
            }
            other => return Err(AtomError::NotTestOnly(other.to_string())),
        }
        Ok(out)
    }
}

/// Which of two compared terms a distinguishing string belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Shortest guarded string with at most `max_actions` actions that lies in
/// exactly one of the two languages, or `None` when the bounded languages
/// coincide.
pub fn bounded_difference(
    t1: &Term,
    t2: &Term,
    alphabet: &GuardedAlphabet,
    max_actions: usize,
    top: TopReading,
) -> Result<Option<(GuardedString, Side)>, AtomError> {
    let mut nfa = Nfa::default();
    let (s1, f1) = nfa.build(t1, alphabet, top)?;
    let (s2, f2) = nfa.build(t2, alphabet, top)?;
    let atoms: Vec<Atom> = alphabet.atoms().collect();
    let n_actions = alphabet.actions().len() as ActionId;

    type Pair = (Vec<u32>, Vec<u32>);
    struct Visit {
        pair: Pair,
        depth: usize,
        parent: Option<(usize, Atom, ActionId)>,
    }
    let start: Pair = (vec![s1], vec![s2]);
    let mut seen: HashSet<Pair> = HashSet::new();
    seen.insert(start.clone());
    let mut visits = vec![Visit { pair: start, depth: 0, parent: None }];
    let mut queue = VecDeque::from([0usize]);

    while let Some(idx) = queue.pop_front() {
        for &atom in &atoms {
            let c1 = nfa.closure(&visits[idx].pair.0, atom);
            let c2 = nfa.closure(&visits[idx].pair.1, atom);
            let acc1 = c1.contains(&f1);
            let acc2 = c2.contains(&f2);
            if acc1 != acc2 {
                let mut steps = Vec::new();
                let mut last = atom;
                let mut cur = idx;
                while let Some((prev, before, act)) = visits[cur].parent {
                    steps.push((act, last));
                    last = before;
                    cur = prev;
                }
                steps.reverse();
                let side = if acc1 { Side::Left } else { Side::Right };
                return Ok(Some((GuardedString { head: last, steps }, side)));
            }
            if visits[idx].depth == max_actions {
                continue;
            }
            for a in 0..n_actions {
                let next: Pair = (nfa.step(&c1, a), nfa.step(&c2, a));
                if seen.insert(next.clone()) {
                    let depth = visits[idx].depth + 1;
                    visits.push(Visit { pair: next, depth, parent: Some((idx, atom, a)) });
                    queue.push_back(visits.len() - 1);
                }
            }
        }
    }
    Ok(None)
}

enum Edge {
    /// Silent move allowed when the current atom is in the guard.
    Guarded(Vec<bool>, u32),
    Action(ActionId, u32),
}

#[derive(Default)]
struct Nfa {
    edges: Vec<Vec<Edge>>,
}

impl Nfa {
    fn state(&mut self) -> u32 {
        self.edges.push(Vec::new());
        (self.edges.len() - 1) as u32
    }

    fn silent(&mut self, from: u32, to: u32, atoms: usize) {
        self.edges[from as usize].push(Edge::Guarded(vec![true; atoms], to));
    }

    fn build(&mut self, t: &Term, alphabet: &GuardedAlphabet, top: TopReading) -> Result<(u32, u32), AtomError> {
        let atoms = alphabet.atom_count();
        let s = self.state();
        let e = self.state();
        if t.is_test_only() {
            let guard = alphabet
                .atoms()
                .map(|a| eval_test(t, a, alphabet))
                .collect::<Result<Vec<_>, _>>()?;
            self.edges[s as usize].push(Edge::Guarded(guard, e));
            return Ok((s, e));
        }
        match t {
            Term::Fail => return Err(AtomError::Fail),
            Term::Act(a) => {
                let id = alphabet.action_id(a).ok_or_else(|| AtomError::UnknownSymbol(a.clone()))?;
                self.edges[s as usize].push(Edge::Action(id, e));
            }
            Term::Top => match top {
                TopReading::AsAction => {
                    let id = alphabet.action_id(TAU).ok_or_else(|| AtomError::UnknownSymbol(TAU.into()))?;
                    self.edges[s as usize].push(Edge::Action(id, e));
                }
                TopReading::Full => {
                    for id in 0..alphabet.actions().len() as ActionId {
                        self.edges[s as usize].push(Edge::Action(id, s));
                    }
                    self.silent(s, e, atoms);
                }
            },
            Term::Plus(a, b) => {
                let (sa, ea) = self.build(a, alphabet, top)?;
                let (sb, eb) = self.build(b, alphabet, top)?;
                self.silent(s, sa, atoms);
                self.silent(s, sb, atoms);
                self.silent(ea, e, atoms);
                self.silent(eb, e, atoms);
            }
            Term::Seq(a, b) => {
                let (sa, ea) = self.build(a, alphabet, top)?;
                let (sb, eb) = self.build(b, alphabet, top)?;
                self.silent(s, sa, atoms);
                self.silent(ea, sb, atoms);
                self.silent(eb, e, atoms);
            }
            Term::Star(a) => {
                let (sa, ea) = self.build(a, alphabet, top)?;
                self.silent(s, e, atoms);
                self.silent(s, sa, atoms);
                self.silent(ea, s, atoms);
            }
            other => return Err(AtomError::NotTestOnly(other.to_string())),
        }
        Ok((s, e))
    }

    fn closure(&self, set: &[u32], atom: Atom) -> Vec<u32> {
        let mut seen = vec![false; self.edges.len()];
        let mut stack: Vec<u32> = set.to_vec();
        for &s in set {
            seen[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for edge in &self.edges[s as usize] {
                if let Edge::Guarded(guard, to) = edge {
                    if guard[atom.0 as usize] && !seen[*to as usize] {
                        seen[*to as usize] = true;
                        stack.push(*to);
                    }
                }
            }
        }
        (0..self.edges.len() as u32).filter(|&s| seen[s as usize]).collect()
    }

    fn step(&self, closed: &[u32], action: ActionId) -> Vec<u32> {
        let mut out: Vec<u32> = closed
            .iter()
            .flat_map(|&s| &self.edges[s as usize])
            .filter_map(|edge| match edge {
                Edge::Action(a, to) if *a == action => Some(*to),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn galpha(actions: &[&str], tests: &[&str]) -> GuardedAlphabet {
        GuardedAlphabet::new(
            actions.iter().map(|s| s.to_string()).collect(),
            tests.iter().map(|s| s.to_string()).collect(),
        )
    }

    fn gs(head: u32, steps: &[(ActionId, u32)]) -> GuardedString {
        GuardedString { head: Atom(head), steps: steps.iter().map(|&(a, b)| (a, Atom(b))).collect() }
    }

    #[test]
    fn atom_enumeration() {
        let a = Alphabet::new(Vec::<String>::new(), ["b"]).unwrap();
        assert_eq!(enumerate_atoms(&a).unwrap(), vec![Atom(0), Atom(1)]);
        let a = Alphabet::new(["p"], Vec::<String>::new()).unwrap();
        assert_eq!(enumerate_atoms(&a).unwrap(), vec![Atom(0)]);
        let a = Alphabet::new(Vec::<String>::new(), ["b", "c"]).unwrap();
        assert_eq!(enumerate_atoms(&a).unwrap().len(), 4);
    }

    #[test]
    fn test_evaluation() {
        let g = galpha(&[], &["b", "c"]);
        let b_not_c = Atom(0b01);
        assert!(eval_test(&Term::test("b"), b_not_c, &g).unwrap());
        assert!(!eval_test(&Term::test("b").not().seq(Term::test("c")), b_not_c, &g).unwrap());
        assert!(eval_test(&Term::One, Atom(3), &g).unwrap());
        assert!(matches!(eval_test(&Term::act("p"), b_not_c, &g), Err(AtomError::NotTestOnly(_))));
    }

    #[test]
    fn coalesced_product() {
        let x = gs(0, &[(0, 1)]);
        let y = gs(1, &[(1, 2)]);
        assert_eq!(coalesce(&x, &y), Some(gs(0, &[(0, 1), (1, 2)])));
        assert_eq!(coalesce(&gs(3, &[]), &gs(3, &[])), Some(gs(3, &[])));
        assert_eq!(coalesce(&gs(0, &[(0, 1)]), &gs(2, &[(0, 3)])), None);
    }

    #[test]
    fn small_languages() {
        let g = galpha(&[], &["b"]);
        let l = language_up_to(&Term::test("b"), &g, 2).unwrap();
        assert_eq!(l, Language::from([gs(1, &[])]));

        let g = galpha(&["p"], &[]);
        let l = language_up_to(&Term::act("p"), &g, 2).unwrap();
        assert_eq!(l, Language::from([gs(0, &[(0, 0)])]));

        let l = language_up_to(&Term::act("p").star(), &g, 2).unwrap();
        assert_eq!(l, Language::from([gs(0, &[]), gs(0, &[(0, 0)]), gs(0, &[(0, 0), (0, 0)])]));
    }

    #[test]
    fn full_top_reading_counts_all_strings() {
        // two actions, one test: 2 + 2*2*2 + 2*(2*2)^2 strings up to length 2
        let g = galpha(&["p", TAU], &["b"]);
        let l = bounded_language(&Term::Top, &g, 2, TopReading::Full).unwrap();
        assert_eq!(l.len(), 2 + 8 + 32);
    }

    #[test]
    fn witness_rendering() {
        let g = galpha(&["p", TAU], &["b", "c"]);
        let w = gs(0b01, &[(0, 0b11), (1, 0b00)]);
        assert_eq!(w.display(&g).to_string(), "b,~c p b,c top ~b,~c");
        let g = galpha(&["p"], &[]);
        assert_eq!(gs(0, &[(0, 0)]).display(&g).to_string(), "1 p 1");
    }

    #[test]
    fn span_membership_matches_enumeration() {
        let a = Alphabet::new(["p", "q"], ["b"]).unwrap();
        let g = GuardedAlphabet::from_alphabet(&a, false);
        let t = parse_term("(b;p + ~b;q)*;b", &a).unwrap();
        let lang = language_up_to(&t, &g, 3).unwrap();
        let universe = bounded_language(&Term::act("p").plus(Term::act("q")).star(), &g, 3, TopReading::AsAction).unwrap();
        for w in &universe {
            assert_eq!(accepts(&t, &g, w, TopReading::AsAction).unwrap(), lang.contains(w));
        }
    }

    #[test]
    fn bounded_difference_finds_shortest() {
        let a = Alphabet::new(["p"], Vec::<String>::new()).unwrap();
        let g = GuardedAlphabet::from_alphabet(&a, false);
        let p_star = parse_term("p*", &a).unwrap();
        let unfolded = parse_term("1 + p;p*", &a).unwrap();
        assert_eq!(bounded_difference(&p_star, &unfolded, &g, 6, TopReading::AsAction).unwrap(), None);
        let pp = parse_term("p;p", &a).unwrap();
        let (w, side) = bounded_difference(&p_star, &pp, &g, 6, TopReading::AsAction).unwrap().unwrap();
        assert_eq!(w.len(), 0);
        assert_eq!(side, Side::Left);
    }
}
