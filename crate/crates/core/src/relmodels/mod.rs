//! Finite relational models: binary relations over `0..n` interpret
//! actions, sub-identities interpret tests, and top is either the complete
//! relation or an explicit reflexive, transitive relation.

mod json;
mod search;

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

use crate::syntax::{is_identifier, Alphabet, Term};

pub use json::{model_from_json, model_to_json, rel_to_pairs};
pub use search::{
    enumerate_models, find_countermodel, random_model, random_model_with, Claim, ClaimKind, Countermodel,
    ModelSpace, Search, TopKind, MAX_ENUMERATION_BITS,
};

/// Largest carrier supported by the bitmatrix representation.
pub const MAX_STATES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("carrier size {0} is outside 1..={MAX_STATES}")]
    BadSize(usize),
    #[error("state {state} is out of range for a carrier of size {n}")]
    StateOutOfRange { state: usize, n: usize },
    #[error("explicit top is not a valid top element: {0}")]
    InvalidTop(String),
    #[error("symbol `{0}` is not interpreted by the model")]
    Undeclared(String),
    #[error("invalid symbol name `{0}`")]
    InvalidName(String),
    #[error("fail cannot be evaluated as a single relation; use eval_fail")]
    Fail,
    #[error("`{0}` is not a test")]
    NotTest(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("model space too large: {0}")]
    BoundsExceeded(String),
    #[error("malformed model JSON: {0}")]
    Json(String),
}

/// A set of states, bit `i` standing for state `i`.
pub type States = u64;

/// Lists the members of a state set in increasing order.
pub fn states_of(set: States) -> Vec<usize> {
    (0..64).filter(|i| set >> i & 1 == 1).collect()
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A binary relation on `0..n`, one 64-bit row per state.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rel {
    n: usize,
    rows: SmallVec<[u64; 8]>,
}

impl Rel {
    pub fn empty(n: usize) -> Rel {
        Rel { n, rows: SmallVec::from_elem(0, n) }
    }

    pub fn identity(n: usize) -> Rel {
        Rel { n, rows: (0..n).map(|i| 1u64 << i).collect() }
    }

    pub fn full(n: usize) -> Rel {
        Rel { n, rows: SmallVec::from_elem(mask(n), n) }
    }

    /// The sub-identity on `set`.
    pub fn diagonal(n: usize, set: States) -> Rel {
        Rel { n, rows: (0..n).map(|i| set & (1u64 << i)).collect() }
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Rel, ModelError> {
        let mut r = Rel::empty(n);
        for &(i, j) in pairs {
            for s in [i, j] {
                if s >= n {
                    return Err(ModelError::StateOutOfRange { state: s, n });
                }
            }
            r.rows[i] |= 1 << j;
        }
        Ok(r)
    }

    /// Builds a relation from the low `n*n` bits of `bits`, bit `i*n + j`
    /// standing for the pair `(i, j)`.
    pub fn from_bits(n: usize, bits: u64) -> Rel {
        Rel { n, rows: (0..n).map(|i| bits >> (i * n) & mask(n)).collect() }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, &row) in self.rows.iter().enumerate() {
            for j in 0..self.n {
                if row >> j & 1 == 1 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn count(&self) -> u32 {
        self.rows.iter().map(|r| r.count_ones()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn union(&self, other: &Rel) -> Rel {
        Rel { n: self.n, rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect() }
    }

    pub fn intersect(&self, other: &Rel) -> Rel {
        Rel { n: self.n, rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a & b).collect() }
    }

    /// `self ∖ other`.
    pub fn minus(&self, other: &Rel) -> Rel {
        Rel { n: self.n, rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a & !b).collect() }
    }

    /// Relational composition: first `self`, then `other`.
    pub fn compose(&self, other: &Rel) -> Rel {
        let rows = self
            .rows
            .iter()
            .map(|&row| {
                let mut out = 0;
                let mut bits = row;
                while bits != 0 {
                    let j = bits.trailing_zeros() as usize;
                    out |= other.rows[j];
                    bits &= bits - 1;
                }
                out
            })
            .collect();
        Rel { n: self.n, rows }
    }

    /// Reflexive-transitive closure by repeated squaring.
    pub fn star(&self) -> Rel {
        let mut r = self.union(&Rel::identity(self.n));
        loop {
            let sq = r.compose(&r);
            if sq == r {
                return r;
            }
            r = sq;
        }
    }

    pub fn is_subset(&self, other: &Rel) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|i| self.contains(i, i))
    }

    pub fn is_transitive(&self) -> bool {
        self.compose(self).is_subset(self)
    }

    /// States reached by some pair of the relation.
    pub fn codomain(&self) -> States {
        self.rows.iter().fold(0, |acc, r| acc | r)
    }

    /// States that start some pair of the relation.
    pub fn domain(&self) -> States {
        self.rows.iter().enumerate().filter(|(_, &r)| r != 0).fold(0, |acc, (i, _)| acc | 1 << i)
    }
}

impl fmt::Debug for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self.pairs().iter().map(|(i, j)| format!("({i},{j})")).collect();
        write!(f, "{{{}}}", pairs.join(","))
    }
}

/// Column support of a relation.
pub fn codomain(r: &Rel) -> States {
    r.codomain()
}

/// Interpretation of top.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TopSpec {
    /// The complete relation.
    Full,
    /// A reflexive, transitive relation containing every action.
    Explicit(Rel),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationalModel {
    n: usize,
    actions: BTreeMap<String, Rel>,
    tests: BTreeMap<String, States>,
    top: TopSpec,
}

impl RelationalModel {
    pub fn new(
        n: usize,
        actions: BTreeMap<String, Rel>,
        tests: BTreeMap<String, States>,
        top: TopSpec,
    ) -> Result<Self, ModelError> {
        if n == 0 || n > MAX_STATES {
            return Err(ModelError::BadSize(n));
        }
        for (name, r) in &actions {
            if !is_identifier(name) {
                return Err(ModelError::InvalidName(name.clone()));
            }
            if r.n != n {
                return Err(ModelError::InvalidParams(format!("relation for `{name}` has size {}", r.n)));
            }
        }
        for (name, &set) in &tests {
            if !is_identifier(name) || actions.contains_key(name) {
                return Err(ModelError::InvalidName(name.clone()));
            }
            if set & !mask(n) != 0 {
                let state = (set & !mask(n)).trailing_zeros() as usize;
                return Err(ModelError::StateOutOfRange { state, n });
            }
        }
        if let TopSpec::Explicit(t) = &top {
            if t.n != n {
                return Err(ModelError::InvalidTop(format!("size {} differs from the carrier", t.n)));
            }
            if !t.is_reflexive() {
                return Err(ModelError::InvalidTop("not reflexive".into()));
            }
            if !t.is_transitive() {
                return Err(ModelError::InvalidTop("not transitive".into()));
            }
            if let Some((name, _)) = actions.iter().find(|(_, r)| !r.is_subset(t)) {
                return Err(ModelError::InvalidTop(format!("does not contain the relation for `{name}`")));
            }
        }
        Ok(RelationalModel { n, actions, tests, top })
    }

    /// Convenience constructor from pair lists.
    pub fn from_lists(
        n: usize,
        actions: &[(&str, &[(usize, usize)])],
        tests: &[(&str, &[usize])],
        top: Option<&[(usize, usize)]>,
    ) -> Result<Self, ModelError> {
        let mut acts = BTreeMap::new();
        for (name, pairs) in actions {
            acts.insert(name.to_string(), Rel::from_pairs(n, pairs)?);
        }
        let mut ts = BTreeMap::new();
        for (name, states) in tests {
            let mut set = 0u64;
            for &s in *states {
                if s >= n {
                    return Err(ModelError::StateOutOfRange { state: s, n });
                }
                set |= 1 << s;
            }
            ts.insert(name.to_string(), set);
        }
        let top = match top {
            None => TopSpec::Full,
            Some(pairs) => TopSpec::Explicit(Rel::from_pairs(n, pairs)?),
        };
        RelationalModel::new(n, acts, ts, top)
    }

    pub fn states(&self) -> usize {
        self.n
    }

    pub fn actions(&self) -> &BTreeMap<String, Rel> {
        &self.actions
    }

    pub fn tests(&self) -> &BTreeMap<String, States> {
        &self.tests
    }

    pub fn top_spec(&self) -> &TopSpec {
        &self.top
    }

    pub fn top(&self) -> Rel {
        match &self.top {
            TopSpec::Full => Rel::full(self.n),
            TopSpec::Explicit(r) => r.clone(),
        }
    }

    pub fn action(&self, name: &str) -> Option<&Rel> {
        self.actions.get(name)
    }

    pub fn test(&self, name: &str) -> Option<States> {
        self.tests.get(name).copied()
    }

    /// The alphabet of symbols the model interprets.
    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.actions.keys().cloned(), self.tests.keys().cloned())
            .expect("model symbols are validated identifiers")
    }

    /// A copy with one action reinterpreted.
    pub fn with_action(&self, name: &str, r: Rel) -> Result<Self, ModelError> {
        let mut actions = self.actions.clone();
        actions.insert(name.to_string(), r);
        RelationalModel::new(self.n, actions, self.tests.clone(), self.top.clone())
    }

    /// A copy with one test reinterpreted.
    pub fn with_test(&self, name: &str, set: States) -> Result<Self, ModelError> {
        let mut tests = self.tests.clone();
        tests.insert(name.to_string(), set);
        RelationalModel::new(self.n, self.actions.clone(), tests, self.top.clone())
    }

    /// A copy with a different top.
    pub fn with_top(&self, top: TopSpec) -> Result<Self, ModelError> {
        RelationalModel::new(self.n, self.actions.clone(), self.tests.clone(), top)
    }
}

/// Interprets a fail-free term as a relation.
pub fn eval_term(m: &RelationalModel, t: &Term) -> Result<Rel, ModelError> {
    let n = m.n;
    Ok(match t {
        Term::Zero => Rel::empty(n),
        Term::One => Rel::identity(n),
        Term::Top => m.top(),
        Term::Fail => return Err(ModelError::Fail),
        Term::Act(a) => m.actions.get(a).cloned().ok_or_else(|| ModelError::Undeclared(a.clone()))?,
        Term::Test(b) => Rel::diagonal(n, m.test(b).ok_or_else(|| ModelError::Undeclared(b.clone()))?),
        Term::Plus(a, b) => eval_term(m, a)?.union(&eval_term(m, b)?),
        Term::Seq(a, b) => eval_term(m, a)?.compose(&eval_term(m, b)?),
        Term::Star(a) => eval_term(m, a)?.star(),
        Term::Not(a) => {
            if !a.is_test_only() {
                return Err(ModelError::NotTest(a.to_string()));
            }
            Rel::identity(n).minus(&eval_term(m, a)?)
        }
    })
}

/// Interprets a test-only term as a set of states.
pub fn eval_test_set(m: &RelationalModel, t: &Term) -> Result<States, ModelError> {
    if !t.is_test_only() {
        return Err(ModelError::NotTest(t.to_string()));
    }
    Ok(eval_term(m, t)?.domain())
}

/// Which triple semantics to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleMode {
    /// `codomain(b;p) ⊆ codomain(c)`
    Hoare,
    /// `codomain(b;p) ⊇ codomain(c)`
    Incorrectness,
}

/// Checks a fail-free triple directly against the codomain definition.
pub fn check_triple_semantic(
    m: &RelationalModel,
    pre: &Term,
    prog: &Term,
    post: &Term,
    mode: TripleMode,
) -> Result<bool, ModelError> {
    let pre_set = eval_test_set(m, pre)?;
    let post_set = eval_test_set(m, post)?;
    let reached = Rel::diagonal(m.n, pre_set).compose(&eval_term(m, prog)?).codomain();
    Ok(match mode {
        TripleMode::Hoare => reached & !post_set == 0,
        TripleMode::Incorrectness => post_set & !reached == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn explicit_top_model() -> RelationalModel {
        RelationalModel::from_lists(2, &[("p", &[(0, 1)])], &[], Some(&[(0, 0), (1, 1), (0, 1)])).unwrap()
    }

    fn eval(m: &RelationalModel, s: &str) -> Rel {
        eval_term(m, &parse_term(s, &m.alphabet()).unwrap()).unwrap()
    }

    #[test]
    fn explicit_top_example() {
        let m = explicit_top_model();
        assert_eq!(eval(&m, "top;p").pairs(), vec![(0, 1)]);
        assert!(eval(&m, "top;p;top;p").is_empty());
        assert_eq!(eval(&m, "1*"), Rel::identity(2));
    }

    #[test]
    fn codomain_examples() {
        assert_eq!(codomain(&Rel::from_pairs(2, &[(0, 1)]).unwrap()), 0b10);
        assert_eq!(codomain(&Rel::empty(2)), 0);
        assert_eq!(codomain(&Rel::from_pairs(2, &[(0, 0), (0, 1)]).unwrap()), 0b11);
    }

    #[test]
    fn separating_valuations() {
        let u = RelationalModel::from_lists(2, &[("p", &[(0, 1)])], &[("b", &[0]), ("c", &[1])], None).unwrap();
        let u0 = u.with_action("p", Rel::empty(2)).unwrap();
        let (b, p, c) = (Term::test("b"), Term::act("p"), Term::test("c"));
        assert!(check_triple_semantic(&u, &b, &p, &c, TripleMode::Incorrectness).unwrap());
        assert!(!check_triple_semantic(&u0, &b, &p, &c, TripleMode::Incorrectness).unwrap());
        assert!(check_triple_semantic(&u, &b, &Term::One, &b, TripleMode::Hoare).unwrap());
    }

    #[test]
    fn closure_and_composition() {
        let r = Rel::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let s = r.star();
        assert_eq!(s.pairs(), vec![(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]);
        assert_eq!(r.compose(&r).pairs(), vec![(0, 2)]);
        assert!(s.is_transitive() && s.is_reflexive());
        assert_eq!(Rel::from_bits(2, 0b0010), Rel::from_pairs(2, &[(0, 1)]).unwrap());
    }

    #[test]
    fn rejects_invalid_tops() {
        let bad = RelationalModel::from_lists(2, &[("p", &[(1, 0)])], &[], Some(&[(0, 0), (1, 1), (0, 1)]));
        assert!(matches!(bad, Err(ModelError::InvalidTop(_))));
        let bad = RelationalModel::from_lists(2, &[], &[], Some(&[(0, 1)]));
        assert!(matches!(bad, Err(ModelError::InvalidTop(_))));
    }
}
