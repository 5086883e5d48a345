//! Term generation: seeded random terms, law-preserving rewrites that turn a
//! term into an equal one, and a counting grammar that can enumerate terms of
//! a given size by index.
//!
//! Generated terms are always valid: `~` only wraps test-only subterms and
//! `*` only wraps terms that mention an action, `top` or `fail`, or the
//! constants `0` and `1`.

use rand::Rng;

use crate::syntax::{Alphabet, Term};

/// The leaves a generator may use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    tests: Vec<Term>,
    actions: Vec<Term>,
}

impl Grammar {
    /// Leaves are `0`, `1`, every test, every action, and optionally `top`
    /// and `fail`.
    pub fn new(alphabet: &Alphabet, with_top: bool, with_fail: bool) -> Grammar {
        let mut tests = vec![Term::Zero, Term::One];
        tests.extend(alphabet.tests().iter().map(Term::test));
        let mut actions: Vec<Term> = alphabet.actions().iter().map(Term::act).collect();
        if with_top {
            actions.push(Term::Top);
        }
        if with_fail {
            actions.push(Term::Fail);
        }
        Grammar { tests, actions }
    }

    pub fn test_leaves(&self) -> &[Term] {
        &self.tests
    }

    pub fn action_leaves(&self) -> &[Term] {
        &self.actions
    }

    /// Number of valid terms of exactly `size` nodes, split into test-only
    /// and the rest. `None` on overflow.
    pub fn counts(&self, size: usize) -> Option<(u128, u128)> {
        Counts::new(self, size).map(|c| (c.t[size], c.a[size]))
    }

    pub fn count(&self, size: usize) -> Option<u128> {
        self.counts(size).and_then(|(t, a)| t.checked_add(a))
    }

    /// The `index`-th valid term with `size` nodes. Test-only terms come
    /// first; within a class the order is fixed by constructor and split.
    pub fn unrank(&self, size: usize, index: u128) -> Option<Term> {
        let c = Counts::new(self, size)?;
        if index < c.t[size] {
            Some(c.unrank_test(self, size, index))
        } else if index - c.t[size] < c.a[size] {
            Some(c.unrank_action(self, size, index - c.t[size]))
        } else {
            None
        }
    }

    /// Deterministic sample of up to `want` distinct terms with at most
    /// `max_size` nodes satisfying `keep`. Each size gets an equal share,
    /// taken at evenly spaced indices; shortfalls roll over to the next size.
    pub fn sample(&self, max_size: usize, want: usize, keep: &dyn Fn(&Term) -> bool) -> Vec<Term> {
        let mut out = Vec::new();
        let mut carry = 0usize;
        for size in 1..=max_size {
            let share = want / max_size + usize::from(size <= want % max_size) + carry;
            let Some(total) = self.count(size) else { break };
            let probes = (share as u128).saturating_mul(8).max(1);
            let stride = (total / probes).max(1);
            let mut got = 0;
            let mut i = 0u128;
            while i < total && got < share {
                let t = self.unrank(size, i).expect("index below count");
                if keep(&t) {
                    out.push(t);
                    got += 1;
                }
                i += stride;
            }
            carry = share - got;
        }
        out
    }
}

struct Counts {
    t: Vec<u128>,
    a: Vec<u128>,
}

impl Counts {
    fn new(g: &Grammar, size: usize) -> Option<Counts> {
        let mut t = vec![0u128; size + 1];
        let mut a = vec![0u128; size + 1];
        for k in 1..=size {
            if k == 1 {
                t[1] = g.tests.len() as u128;
                a[1] = g.actions.len() as u128;
                continue;
            }
            let mut tk = t[k - 1];
            let mut ak = a[k - 1].checked_add(if k == 2 { 2 } else { 0 })?;
            for i in 1..k - 1 {
                let j = k - 1 - i;
                let tt = t[i].checked_mul(t[j])?;
                let all = t[i].checked_add(a[i])?.checked_mul(t[j].checked_add(a[j])?)?;
                tk = tk.checked_add(tt.checked_mul(2)?)?;
                ak = ak.checked_add((all - tt).checked_mul(2)?)?;
            }
            t[k] = tk;
            a[k] = ak;
        }
        Some(Counts { t, a })
    }

    fn unrank_test(&self, g: &Grammar, k: usize, mut idx: u128) -> Term {
        if k == 1 {
            return g.tests[idx as usize].clone();
        }
        if idx < self.t[k - 1] {
            return self.unrank_test(g, k - 1, idx).not();
        }
        idx -= self.t[k - 1];
        for seq in [false, true] {
            for i in 1..k - 1 {
                let j = k - 1 - i;
                let block = self.t[i] * self.t[j];
                if idx < block {
                    let l = self.unrank_test(g, i, idx / self.t[j]);
                    let r = self.unrank_test(g, j, idx % self.t[j]);
                    return if seq { l.seq(r) } else { l.plus(r) };
                }
                idx -= block;
            }
        }
        unreachable!("index checked against count")
    }

    fn unrank_any(&self, g: &Grammar, k: usize, idx: u128) -> Term {
        if idx < self.t[k] {
            self.unrank_test(g, k, idx)
        } else {
            self.unrank_action(g, k, idx - self.t[k])
        }
    }

    fn unrank_action(&self, g: &Grammar, k: usize, mut idx: u128) -> Term {
        if k == 1 {
            return g.actions[idx as usize].clone();
        }
        if idx < self.a[k - 1] {
            return self.unrank_action(g, k - 1, idx).star();
        }
        idx -= self.a[k - 1];
        if k == 2 {
            if idx < 2 {
                return if idx == 0 { Term::Zero.star() } else { Term::One.star() };
            }
            idx -= 2;
        }
        for seq in [false, true] {
            for i in 1..k - 1 {
                let j = k - 1 - i;
                let (gi, gj) = (self.t[i] + self.a[i], self.t[j] + self.a[j]);
                let block = gi * gj - self.t[i] * self.t[j];
                if idx < block {
                    // pairs (left, right) in row-major order, skipping test-test
                    let (l, r) = self.pair_with_action(g, i, j, idx);
                    return if seq { l.seq(r) } else { l.plus(r) };
                }
                idx -= block;
            }
        }
        unreachable!("index checked against count")
    }

    fn pair_with_action(&self, g: &Grammar, i: usize, j: usize, idx: u128) -> (Term, Term) {
        // left test-only, right action-bearing
        let first = self.t[i] * self.a[j];
        if idx < first {
            return (self.unrank_test(g, i, idx / self.a[j]), self.unrank_action(g, j, idx % self.a[j]));
        }
        let idx = idx - first;
        let gj = self.t[j] + self.a[j];
        (self.unrank_action(g, i, idx / gj), self.unrank_any(g, j, idx % gj))
    }
}

/// Settings for [`random_term`].
#[derive(Debug, Clone, PartialEq)]
pub struct TermGen {
    pub grammar: Grammar,
    pub max_size: usize,
    /// Probability that a composite node is a test-only subterm (and so may
    /// carry negations).
    pub test_bias: f64,
    pub star_bias: f64,
}

impl TermGen {
    pub fn new(grammar: Grammar, max_size: usize) -> TermGen {
        TermGen { grammar, max_size, test_bias: 0.25, star_bias: 0.15 }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Want {
    Any,
    Test,
    Action,
}

/// A random valid term whose size is uniform in `1..=max_size`.
pub fn random_term<R: Rng>(rng: &mut R, cfg: &TermGen) -> Term {
    let size = rng.gen_range(1..=cfg.max_size.max(1));
    random_term_of_size(rng, cfg, size)
}

/// A random valid term with exactly `size` nodes.
pub fn random_term_of_size<R: Rng>(rng: &mut R, cfg: &TermGen, size: usize) -> Term {
    grow(rng, cfg, size.max(1), Want::Any)
}

fn pick<R: Rng>(rng: &mut R, xs: &[Term]) -> Term {
    xs[rng.gen_range(0..xs.len())].clone()
}

fn grow<R: Rng>(rng: &mut R, cfg: &TermGen, size: usize, want: Want) -> Term {
    let g = &cfg.grammar;
    let no_actions = g.actions.is_empty();
    let want = match want {
        Want::Action if no_actions => Want::Test,
        Want::Any if no_actions || rng.gen_bool(cfg.test_bias) => Want::Test,
        Want::Any => Want::Action,
        w => w,
    };
    match (want, size) {
        (Want::Test, 1) => pick(rng, &g.tests),
        (Want::Test, 2) => pick(rng, &g.tests).not(),
        (Want::Test, _) => {
            if rng.gen_bool(0.2) {
                return grow(rng, cfg, size - 1, Want::Test).not();
            }
            let i = rng.gen_range(1..size - 1);
            let l = grow(rng, cfg, i, Want::Test);
            let r = grow(rng, cfg, size - 1 - i, Want::Test);
            if rng.gen_bool(0.5) {
                l.plus(r)
            } else {
                l.seq(r)
            }
        }
        (_, 1) => {
            // mix test leaves into action positions through the `Any` path
            pick(rng, &g.actions)
        }
        (_, 2) => pick(rng, &g.actions).star(),
        (_, _) => {
            if rng.gen_bool(cfg.star_bias) {
                return grow(rng, cfg, size - 1, Want::Action).star();
            }
            let i = rng.gen_range(1..size - 1);
            let (wl, wr) = if rng.gen_bool(0.5) { (Want::Action, Want::Any) } else { (Want::Any, Want::Action) };
            let l = grow(rng, cfg, i, wl);
            let r = grow(rng, cfg, size - 1 - i, wr);
            if rng.gen_bool(0.5) {
                l.plus(r)
            } else {
                l.seq(r)
            }
        }
    }
}

/// Applies one law of TopKAT at a random position. The result denotes the
/// same element in every TopKAT. Laws that fail without right annihilation
/// are never used on terms containing `fail`.
pub fn rewrite_once<R: Rng>(rng: &mut R, t: &Term) -> Term {
    let target = rng.gen_range(0..t.size());
    let mut counter = 0;
    rewrite_at(rng, t, target, &mut counter)
}

fn rewrite_at<R: Rng>(rng: &mut R, t: &Term, target: usize, counter: &mut usize) -> Term {
    let here = *counter;
    *counter += 1;
    if here == target {
        return apply_law(rng, t);
    }
    match t {
        Term::Plus(a, b) => {
            let a = rewrite_at(rng, a, target, counter);
            a.plus(rewrite_at(rng, b, target, counter))
        }
        Term::Seq(a, b) => {
            let a = rewrite_at(rng, a, target, counter);
            a.seq(rewrite_at(rng, b, target, counter))
        }
        // `0*` and `1*` are atomic: rewriting their body would leave a star
        // over a compound test
        Term::Star(a) if a.is_test_only() => {
            *counter += a.size();
            t.clone()
        }
        Term::Star(a) => rewrite_at(rng, a, target, counter).star(),
        Term::Not(a) => rewrite_at(rng, a, target, counter).not(),
        leaf => leaf.clone(),
    }
}

fn apply_law<R: Rng>(rng: &mut R, t: &Term) -> Term {
    let mut options: Vec<Term> = vec![t.clone().plus(t.clone()), t.clone().plus(Term::Zero), Term::One.seq(t.clone()), t.clone().seq(Term::One)];
    match t {
        Term::Plus(a, b) => {
            options.push((**b).clone().plus((**a).clone()));
            if let Term::Plus(x, y) = &**a {
                options.push((**x).clone().plus((**y).clone().plus((**b).clone())));
            }
        }
        Term::Seq(a, b) => {
            if let Term::Seq(x, y) = &**a {
                options.push((**x).clone().seq((**y).clone().seq((**b).clone())));
            }
            if let Term::Seq(x, y) = &**b {
                options.push((**a).clone().seq((**x).clone()).seq((**y).clone()));
            }
            if let Term::Plus(x, y) = &**b {
                options.push((**a).clone().seq((**x).clone()).plus((**a).clone().seq((**y).clone())));
            }
            if let Term::Plus(x, y) = &**a {
                options.push((**x).clone().seq((**b).clone()).plus((**y).clone().seq((**b).clone())));
            }
        }
        Term::Star(a) => {
            let s = t.clone();
            options.push(Term::One.plus((**a).clone().seq(s.clone())));
            options.push(Term::One.plus(s.clone().seq((**a).clone())));
            options.push(s.clone().seq(s));
        }
        Term::Top => {
            options.push(Term::Top.seq(Term::Top));
            options.push(Term::Top.star());
            options.push(Term::Top.plus(Term::One));
        }
        Term::Not(a) => {
            if let Term::Plus(x, y) = &**a {
                options.push((**x).clone().not().seq((**y).clone().not()));
            }
            if let Term::Not(x) = &**a {
                options.push((**x).clone());
            }
        }
        _ => {}
    }
    if t.is_test_only() {
        options.push(t.clone().not().not());
        options.push(t.clone().seq(t.clone()));
    }
    if !t.contains_fail() {
        options.push(t.clone().plus(t.clone().seq(Term::Zero)));
    }
    options.swap_remove(rng.gen_range(0..options.len()))
}

/// Replaces one random leaf by another leaf of the same class, or swaps the
/// operands of one product. The result is valid but usually unequal.
pub fn mutate<R: Rng>(rng: &mut R, t: &Term, grammar: &Grammar) -> Term {
    let target = rng.gen_range(0..t.size());
    let mut counter = 0;
    mutate_at(rng, t, grammar, target, &mut counter)
}

fn mutate_at<R: Rng>(rng: &mut R, t: &Term, g: &Grammar, target: usize, counter: &mut usize) -> Term {
    let here = *counter;
    *counter += 1;
    if here == target {
        return match t {
            Term::Seq(a, b) => (**b).clone().seq((**a).clone()),
            Term::Plus(a, b) => (**a).clone().seq((**b).clone()),
            Term::Zero => Term::One,
            Term::One => Term::Zero,
            leaf if leaf.is_test_only() && !matches!(leaf, Term::Not(_)) => pick(rng, &g.tests),
            Term::Act(_) | Term::Top | Term::Fail if !g.actions.is_empty() => pick(rng, &g.actions),
            other => other.clone(),
        };
    }
    match t {
        Term::Plus(a, b) => {
            let a = mutate_at(rng, a, g, target, counter);
            a.plus(mutate_at(rng, b, g, target, counter))
        }
        Term::Seq(a, b) => {
            let a = mutate_at(rng, a, g, target, counter);
            a.seq(mutate_at(rng, b, g, target, counter))
        }
        Term::Star(a) if a.is_test_only() => {
            *counter += a.size();
            t.clone()
        }
        Term::Star(a) => mutate_at(rng, a, g, target, counter).star(),
        Term::Not(a) => mutate_at(rng, a, g, target, counter).not(),
        leaf => leaf.clone(),
    }
}

/// How a pair from [`random_pair`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairOrigin {
    /// Two independent terms.
    Independent,
    /// A term and a rewrite of it; equal by construction.
    Rewritten,
    /// A rewrite followed by one mutation.
    NearMiss,
}

/// A random pair of terms, each at most `cfg.max_size` nodes. A third of the
/// pairs are independent, a third are equal by rewriting, and a third are
/// near misses.
pub fn random_pair<R: Rng>(rng: &mut R, cfg: &TermGen) -> (Term, Term, PairOrigin) {
    let origin = match rng.gen_range(0..3) {
        0 => PairOrigin::Independent,
        1 => PairOrigin::Rewritten,
        _ => PairOrigin::NearMiss,
    };
    if origin == PairOrigin::Independent {
        return (random_term(rng, cfg), random_term(rng, cfg), origin);
    }
    let base_cfg = TermGen { max_size: (cfg.max_size * 2 / 3).max(1), ..cfg.clone() };
    let base = random_term(rng, &base_cfg);
    let mut other = base.clone();
    for _ in 0..rng.gen_range(1..=3) {
        let next = rewrite_once(rng, &other);
        if next.size() <= cfg.max_size {
            other = next;
        }
    }
    if origin == PairOrigin::NearMiss {
        other = mutate(rng, &other, &cfg.grammar);
    }
    if rng.gen_bool(0.5) {
        (base, other, origin)
    } else {
        (other, base, origin)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::syntax::{validate, TermKind};

    fn grammar() -> Grammar {
        Grammar::new(&Alphabet::new(["p"], ["b"]).unwrap(), true, true)
    }

    fn alpha() -> Alphabet {
        Alphabet::new(["p"], ["b"]).unwrap()
    }

    #[test]
    fn counts_match_brute_force() {
        let g = grammar();
        // size 1: 0 1 b | p top fail; size 2: ~0 ~1 ~b | p* top* fail* 0* 1*
        assert_eq!(g.counts(1), Some((3, 3)));
        assert_eq!(g.counts(2), Some((3, 5)));
        for size in 1..=5 {
            let total = g.count(size).unwrap();
            let terms: HashSet<Term> = (0..total).map(|i| g.unrank(size, i).unwrap()).collect();
            assert_eq!(terms.len() as u128, total, "size {size}");
            for t in &terms {
                assert_eq!(t.size(), size);
                validate(t, &alpha(), TermKind::FailTopKat).unwrap();
            }
            assert!(g.unrank(size, total).is_none());
        }
    }

    #[test]
    fn sample_is_deterministic_and_filtered() {
        let g = grammar();
        let keep = |t: &Term| t.contains_fail();
        let s1 = g.sample(8, 100, &keep);
        assert_eq!(s1, g.sample(8, 100, &keep));
        assert_eq!(s1.len(), 100);
        assert!(s1.iter().all(|t| t.contains_fail() && t.size() <= 8));
        assert_eq!(s1.iter().collect::<HashSet<_>>().len(), 100);
    }

    #[test]
    fn random_terms_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = TermGen::new(grammar(), 20);
        for _ in 0..500 {
            let t = random_term(&mut rng, &cfg);
            assert!(t.size() <= 20);
            validate(&t, &alpha(), TermKind::FailTopKat).unwrap();
            validate(&rewrite_once(&mut rng, &t), &alpha(), TermKind::FailTopKat).unwrap();
            validate(&mutate(&mut rng, &t, &cfg.grammar), &alpha(), TermKind::FailTopKat).unwrap();
        }
        for size in 1..30 {
            assert_eq!(random_term_of_size(&mut rng, &cfg, size).size(), size);
        }
    }
}
