//! Hash-consed term arena with Antimirov partial derivatives over guarded
//! strings, and a Hopcroft-Karp style equivalence check over sets of
//! residuals.

use std::collections::{HashMap, VecDeque};

use crate::atoms::{eval_test, ActionId, Atom, AtomError, GuardedAlphabet, GuardedString, Side};
use crate::syntax::Term;

pub(crate) type NodeId = u32;
pub(crate) type SetId = u32;

/// Test-only subterms are compiled to the set of atoms satisfying them.
#[derive(Clone, PartialEq, Eq, Hash)]
struct AtomSet(Vec<u64>);

impl AtomSet {
    fn contains(&self, atom: Atom) -> bool {
        let i = atom.0 as usize;
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn meet(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn join(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    Zero,
    One,
    Test(u32),
    Act(ActionId),
    Plus(NodeId, NodeId),
    Seq(NodeId, NodeId),
    Star(NodeId),
}

pub(crate) struct Arena<'a> {
    alphabet: &'a GuardedAlphabet,
    atom_count: usize,
    full: AtomSet,
    nodes: Vec<Node>,
    node_index: HashMap<Node, NodeId>,
    tests: Vec<AtomSet>,
    test_terms: Vec<Term>,
    test_index: HashMap<AtomSet, u32>,
    obs_memo: HashMap<(NodeId, Atom), bool>,
    deriv_memo: HashMap<(NodeId, Atom, ActionId), Vec<NodeId>>,
    sets: Vec<Vec<NodeId>>,
    set_index: HashMap<Vec<NodeId>, SetId>,
    step_memo: HashMap<(SetId, Atom, ActionId), SetId>,
}

pub(crate) const ZERO: NodeId = 0;
pub(crate) const ONE: NodeId = 1;

impl<'a> Arena<'a> {
    pub(crate) fn new(alphabet: &'a GuardedAlphabet) -> Self {
        let atom_count = alphabet.atom_count();
        let words = atom_count.div_ceil(64);
        let mut full = vec![0u64; words];
        for i in 0..atom_count {
            full[i / 64] |= 1 << (i % 64);
        }
        let mut arena = Arena {
            alphabet,
            atom_count,
            full: AtomSet(full),
            nodes: Vec::new(),
            node_index: HashMap::new(),
            tests: Vec::new(),
            test_terms: Vec::new(),
            test_index: HashMap::new(),
            obs_memo: HashMap::new(),
            deriv_memo: HashMap::new(),
            sets: Vec::new(),
            set_index: HashMap::new(),
            step_memo: HashMap::new(),
        };
        assert_eq!(arena.intern(Node::Zero), ZERO);
        assert_eq!(arena.intern(Node::One), ONE);
        arena
    }

    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.node_index.get(&node) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node);
        self.node_index.insert(node, id);
        id
    }

    fn test_node(&mut self, set: AtomSet, repr: Term) -> NodeId {
        if set.is_empty() {
            return ZERO;
        }
        if set == self.full {
            return ONE;
        }
        let tid = match self.test_index.get(&set) {
            Some(&tid) => tid,
            None => {
                let tid = self.tests.len() as u32;
                self.tests.push(set.clone());
                self.test_terms.push(repr);
                self.test_index.insert(set, tid);
                tid
            }
        };
        self.intern(Node::Test(tid))
    }

    fn test_set(&self, id: NodeId) -> Option<AtomSet> {
        match self.nodes[id as usize] {
            Node::Zero => Some(AtomSet(vec![0; self.full.0.len()])),
            Node::One => Some(self.full.clone()),
            Node::Test(tid) => Some(self.tests[tid as usize].clone()),
            _ => None,
        }
    }

    /// Compiles a fail-free, top-free term.
    pub(crate) fn compile(&mut self, t: &Term) -> Result<NodeId, AtomError> {
        if t.is_test_only() {
            let mut bits = vec![0u64; self.full.0.len()];
            for i in 0..self.atom_count {
                if eval_test(t, Atom(i as u32), self.alphabet)? {
                    bits[i / 64] |= 1 << (i % 64);
                }
            }
            return Ok(self.test_node(AtomSet(bits), t.clone()));
        }
        Ok(match t {
            Term::Act(a) => {
                let id = self.alphabet.action_id(a).ok_or_else(|| AtomError::UnknownSymbol(a.clone()))?;
                self.intern(Node::Act(id))
            }
            Term::Plus(a, b) => {
                let (a, b) = (self.compile(a)?, self.compile(b)?);
                self.plus(a, b)
            }
            Term::Seq(a, b) => {
                let (a, b) = (self.compile(a)?, self.compile(b)?);
                self.seq(a, b)
            }
            Term::Star(a) => {
                let a = self.compile(a)?;
                self.star(a)
            }
            Term::Fail => return Err(AtomError::Fail),
            Term::Top => return Err(AtomError::UnknownSymbol("top".into())),
            other => return Err(AtomError::NotTestOnly(other.to_string())),
        })
    }

    fn summands(&self, id: NodeId, out: &mut Vec<NodeId>) {
        match self.nodes[id as usize] {
            Node::Plus(a, b) => {
                self.summands(a, out);
                self.summands(b, out);
            }
            Node::Zero => {}
            _ => out.push(id),
        }
    }

    /// Sum normalized up to associativity, commutativity, idempotence and
    /// the zero unit; test summands are merged into one test.
    fn plus(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let mut parts = Vec::new();
        self.summands(a, &mut parts);
        self.summands(b, &mut parts);
        let mut tests: Option<(AtomSet, Term)> = None;
        let mut rest = Vec::new();
        for p in parts {
            match self.test_set(p) {
                Some(set) => {
                    let repr = self.to_term(p);
                    tests = Some(match tests {
                        None => (set, repr),
                        Some((s, r)) => (s.join(&set), r.plus(repr)),
                    });
                }
                None => rest.push(p),
            }
        }
        if let Some((set, repr)) = tests {
            let t = self.test_node(set, repr);
            if t != ZERO {
                rest.push(t);
            }
        }
        rest.sort_unstable();
        rest.dedup();
        let mut iter = rest.into_iter().rev();
        let Some(mut acc) = iter.next() else { return ZERO };
        for p in iter {
            acc = self.intern(Node::Plus(p, acc));
        }
        acc
    }

    /// Product normalized to right-nested form with unit and annihilator
    /// laws; adjacent tests are intersected.
    fn seq(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if a == ZERO || b == ZERO {
            return ZERO;
        }
        if a == ONE {
            return b;
        }
        if b == ONE {
            return a;
        }
        if let Node::Seq(x, y) = self.nodes[a as usize] {
            let tail = self.seq(y, b);
            return self.seq(x, tail);
        }
        if let Some(sa) = self.test_set(a) {
            if let Some(sb) = self.test_set(b) {
                let repr = self.to_term(a).seq(self.to_term(b));
                return self.test_node(sa.meet(&sb), repr);
            }
            if let Node::Seq(x, rest) = self.nodes[b as usize] {
                if let Some(sx) = self.test_set(x) {
                    let repr = self.to_term(a).seq(self.to_term(x));
                    let head = self.test_node(sa.meet(&sx), repr);
                    return self.seq(head, rest);
                }
            }
        }
        self.intern(Node::Seq(a, b))
    }

    fn star(&mut self, a: NodeId) -> NodeId {
        match self.nodes[a as usize] {
            Node::Zero | Node::One | Node::Test(_) => ONE,
            Node::Star(_) => a,
            _ => self.intern(Node::Star(a)),
        }
    }

    pub(crate) fn obs(&mut self, id: NodeId, atom: Atom) -> bool {
        if let Some(&v) = self.obs_memo.get(&(id, atom)) {
            return v;
        }
        let v = match self.nodes[id as usize] {
            Node::Zero | Node::Act(_) => false,
            Node::One | Node::Star(_) => true,
            Node::Test(tid) => self.tests[tid as usize].contains(atom),
            Node::Plus(a, b) => self.obs(a, atom) || self.obs(b, atom),
            Node::Seq(a, b) => self.obs(a, atom) && self.obs(b, atom),
        };
        self.obs_memo.insert((id, atom), v);
        v
    }

    /// Residuals of `id` after reading atom `atom` followed by `action`.
    pub(crate) fn derive(&mut self, id: NodeId, atom: Atom, action: ActionId) -> Vec<NodeId> {
        if let Some(d) = self.deriv_memo.get(&(id, atom, action)) {
            return d.clone();
        }
        let mut out = match self.nodes[id as usize] {
            Node::Zero | Node::One | Node::Test(_) => Vec::new(),
            Node::Act(a) if a == action => vec![ONE],
            Node::Act(_) => Vec::new(),
            Node::Plus(a, b) => {
                let mut d = self.derive(a, atom, action);
                d.extend(self.derive(b, atom, action));
                d
            }
            Node::Seq(a, b) => {
                let mut d: Vec<NodeId> = self
                    .derive(a, atom, action)
                    .into_iter()
                    .map(|r| self.seq(r, b))
                    .collect();
                if self.obs(a, atom) {
                    d.extend(self.derive(b, atom, action));
                }
                d
            }
            Node::Star(a) => self
                .derive(a, atom, action)
                .into_iter()
                .map(|r| self.seq(r, id))
                .collect(),
        };
        out.retain(|&r| r != ZERO);
        out.sort_unstable();
        out.dedup();
        self.deriv_memo.insert((id, atom, action), out.clone());
        out
    }

    /// Rebuilds a syntax tree for a node.
    pub(crate) fn to_term(&self, id: NodeId) -> Term {
        match self.nodes[id as usize] {
            Node::Zero => Term::Zero,
            Node::One => Term::One,
            Node::Test(tid) => self.test_terms[tid as usize].clone(),
            Node::Act(a) => Term::Act(self.alphabet.actions()[a as usize].clone()),
            Node::Plus(a, b) => self.to_term(a).plus(self.to_term(b)),
            Node::Seq(a, b) => self.to_term(a).seq(self.to_term(b)),
            Node::Star(a) => self.to_term(a).star(),
        }
    }

    pub(crate) fn state_set(&mut self, mut members: Vec<NodeId>) -> SetId {
        members.retain(|&r| r != ZERO);
        members.sort_unstable();
        members.dedup();
        if let Some(&id) = self.set_index.get(&members) {
            return id;
        }
        let id = self.sets.len() as SetId;
        self.sets.push(members.clone());
        self.set_index.insert(members, id);
        id
    }

    fn set_obs(&mut self, set: SetId, atom: Atom) -> bool {
        let members = self.sets[set as usize].clone();
        members.into_iter().any(|m| self.obs(m, atom))
    }

    fn set_step(&mut self, set: SetId, atom: Atom, action: ActionId) -> SetId {
        if let Some(&s) = self.step_memo.get(&(set, atom, action)) {
            return s;
        }
        let members = self.sets[set as usize].clone();
        let mut next = Vec::new();
        for m in members {
            next.extend(self.derive(m, atom, action));
        }
        let s = self.state_set(next);
        self.step_memo.insert((set, atom, action), s);
        s
    }

    pub(crate) fn set_count(&self) -> usize {
        self.sets.len()
    }

    /// Checks language equality of two state sets. Returns a distinguishing
    /// guarded string (and the side accepting it) on failure, plus the
    /// number of pairs that were expanded.
    pub(crate) fn bisimulate(&mut self, left: SetId, right: SetId) -> (Option<(GuardedString, Side)>, usize) {
        struct Visit {
            pair: (SetId, SetId),
            parent: Option<(usize, Atom, ActionId)>,
        }
        let mut classes = UnionFind::default();
        let atoms: Vec<Atom> = self.alphabet.atoms().collect();
        let n_actions = self.alphabet.actions().len() as ActionId;
        let mut visits = vec![Visit { pair: (left, right), parent: None }];
        let mut queue = VecDeque::from([0usize]);
        let mut expanded = 0usize;
        #[cfg(debug_assertions)]
        let mut processed = std::collections::HashSet::new();

        while let Some(idx) = queue.pop_front() {
            let (x, y) = visits[idx].pair;
            if !classes.union(x, y) {
                continue;
            }
            #[cfg(debug_assertions)]
            debug_assert!(processed.insert((x, y)), "pair expanded twice");
            expanded += 1;
            for &atom in &atoms {
                let ox = self.set_obs(x, atom);
                let oy = self.set_obs(y, atom);
                if ox != oy {
                    let mut steps = Vec::new();
                    let mut last = atom;
                    let mut cur = idx;
                    while let Some((prev, before, act)) = visits[cur].parent {
                        steps.push((act, last));
                        last = before;
                        cur = prev;
                    }
                    steps.reverse();
                    let side = if ox { Side::Left } else { Side::Right };
                    return (Some((GuardedString { head: last, steps }, side)), expanded);
                }
                for a in 0..n_actions {
                    let nx = self.set_step(x, atom, a);
                    let ny = self.set_step(y, atom, a);
                    if classes.find(nx) != classes.find(ny) {
                        visits.push(Visit { pair: (nx, ny), parent: Some((idx, atom, a)) });
                        queue.push_back(visits.len() - 1);
                    }
                }
            }
        }
        (None, expanded)
    }
}

#[derive(Default)]
struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn find(&mut self, x: u32) -> u32 {
        let xi = x as usize;
        if xi >= self.parent.len() {
            let start = self.parent.len() as u32;
            self.parent.extend(start..=x);
        }
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    /// Merges the classes of `x` and `y`; false if they were already merged.
    fn union(&mut self, x: u32, y: u32) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        self.parent[rx as usize] = ry;
        true
    }
}
