//! Model generation, exhaustive enumeration and countermodel search.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{eval_term, ModelError, Rel, RelationalModel, TopSpec};
use crate::syntax::{Alphabet, Term};

/// Upper bound on the number of bits describing one model in an exhaustive
/// enumeration (`|K|·n² + |B|·n`).
pub const MAX_ENUMERATION_BITS: u32 = 24;

/// How top is interpreted in generated models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopKind {
    /// The complete relation.
    Full,
    /// The reflexive-transitive closure of the union of all actions.
    Closure,
}

fn closure_top(n: usize, actions: &BTreeMap<String, Rel>) -> Rel {
    actions.values().fold(Rel::identity(n), |acc, r| acc.union(r)).star()
}

fn build(
    n: usize,
    actions: BTreeMap<String, Rel>,
    tests: BTreeMap<String, u64>,
    top: TopKind,
) -> Result<RelationalModel, ModelError> {
    let top = match top {
        TopKind::Full => TopSpec::Full,
        TopKind::Closure => TopSpec::Explicit(closure_top(n, &actions)),
    };
    RelationalModel::new(n, actions, tests, top)
}

/// Samples a model from `rng`: each action pair is present with
/// probability `density`, each state satisfies each test with probability ½.
pub fn random_model_with<R: Rng>(
    rng: &mut R,
    n: usize,
    alphabet: &Alphabet,
    top: TopKind,
    density: f64,
) -> Result<RelationalModel, ModelError> {
    if n == 0 || n > super::MAX_STATES {
        return Err(ModelError::BadSize(n));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(ModelError::InvalidParams(format!("density {density} is not a probability")));
    }
    let mut actions = BTreeMap::new();
    for a in alphabet.actions() {
        let mut r = Rel::empty(n);
        for i in 0..n {
            for j in 0..n {
                if rng.gen_bool(density) {
                    r.rows[i] |= 1 << j;
                }
            }
        }
        actions.insert(a.clone(), r);
    }
    let mut tests = BTreeMap::new();
    for b in alphabet.tests() {
        let mut set = 0u64;
        for i in 0..n {
            if rng.gen_bool(0.5) {
                set |= 1 << i;
            }
        }
        tests.insert(b.clone(), set);
    }
    build(n, actions, tests, top)
}

/// Samples one model deterministically from `seed`.
pub fn random_model(
    n: usize,
    alphabet: &Alphabet,
    top: TopKind,
    density: f64,
    seed: u64,
) -> Result<RelationalModel, ModelError> {
    random_model_with(&mut ChaCha8Rng::seed_from_u64(seed), n, alphabet, top, density)
}

/// All models of a given size over an alphabet, each described by a bit
/// mask: `n²` bits per action (row-major), then `n` bits per test.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    n: usize,
    actions: Vec<String>,
    tests: Vec<String>,
    top: TopKind,
    bits: u32,
}

impl ModelSpace {
    pub fn new(n: usize, alphabet: &Alphabet, top: TopKind) -> Result<Self, ModelError> {
        if n == 0 || n > 8 {
            return Err(ModelError::BadSize(n));
        }
        let bits = alphabet.actions().len() * n * n + alphabet.tests().len() * n;
        if bits > MAX_ENUMERATION_BITS as usize {
            return Err(ModelError::BoundsExceeded(format!(
                "{bits} bits per model at n={n} (limit {MAX_ENUMERATION_BITS})"
            )));
        }
        Ok(ModelSpace {
            n,
            actions: alphabet.actions().to_vec(),
            tests: alphabet.tests().to_vec(),
            top,
            bits: bits as u32,
        })
    }

    pub fn states(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> u64 {
        1u64 << self.bits
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Decodes the model described by `mask`.
    pub fn model(&self, mask: u64) -> RelationalModel {
        let n = self.n;
        let nn = n * n;
        let mut actions = BTreeMap::new();
        for (k, a) in self.actions.iter().enumerate() {
            actions.insert(a.clone(), Rel::from_bits(n, mask >> (k * nn)));
        }
        let base = self.actions.len() * nn;
        let mut tests = BTreeMap::new();
        for (k, b) in self.tests.iter().enumerate() {
            tests.insert(b.clone(), mask >> (base + k * n) & ((1u64 << n) - 1));
        }
        let top = match self.top {
            TopKind::Full => TopSpec::Full,
            TopKind::Closure => TopSpec::Explicit(closure_top(n, &actions)),
        };
        // symbols come from a validated alphabet and the closure top is lawful
        RelationalModel { n, actions, tests, top }
    }

    /// Masks with exactly `weight` bits set, in increasing order.
    pub fn masks_of_weight(&self, weight: u32) -> Vec<u64> {
        let limit = 1u64 << self.bits;
        if weight > self.bits {
            return Vec::new();
        }
        if weight == 0 {
            return vec![0];
        }
        let mut out = Vec::new();
        let mut x = (1u64 << weight) - 1;
        while x < limit {
            out.push(x);
            let c = x & x.wrapping_neg();
            let r = x + c;
            x = (((r ^ x) >> 2) / c) | r;
        }
        out
    }

    /// Every mask, ordered by popcount and then numerically.
    pub fn ordered_masks(&self) -> impl Iterator<Item = u64> + '_ {
        (0..=self.bits).flat_map(move |w| self.masks_of_weight(w))
    }

    /// Every model, fewest pairs and test members first.
    pub fn iter(&self) -> impl Iterator<Item = RelationalModel> + '_ {
        self.ordered_masks().map(move |m| self.model(m))
    }
}

/// Exhaustive Full-top enumeration of the models of size `n`.
pub fn enumerate_models(n: usize, alphabet: &Alphabet) -> Result<ModelSpace, ModelError> {
    ModelSpace::new(n, alphabet, TopKind::Full)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimKind {
    Eq,
    Leq,
}

/// An equation or inequality between fail-free terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim {
    pub lhs: Term,
    pub rhs: Term,
    pub kind: ClaimKind,
}

impl Claim {
    pub fn eq(lhs: Term, rhs: Term) -> Claim {
        Claim { lhs, rhs, kind: ClaimKind::Eq }
    }

    pub fn leq(lhs: Term, rhs: Term) -> Claim {
        Claim { lhs, rhs, kind: ClaimKind::Leq }
    }

    /// Evaluates both sides and reports whether the claim holds.
    pub fn check(&self, m: &RelationalModel) -> Result<(bool, Rel, Rel), ModelError> {
        let l = eval_term(m, &self.lhs)?;
        let r = eval_term(m, &self.rhs)?;
        let holds = match self.kind {
            ClaimKind::Eq => l == r,
            ClaimKind::Leq => l.is_subset(&r),
        };
        Ok((holds, l, r))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Search {
    /// Every model of size `1..=max_states`, smallest first.
    Exhaustive { max_states: usize, top: TopKind },
    /// `count` seeded random models of size `states`.
    Random { states: usize, count: usize, density: f64, top: TopKind, seed: u64 },
}

/// A model refuting a claim, with both evaluated sides.
#[derive(Debug, Clone, PartialEq)]
pub struct Countermodel {
    pub model: RelationalModel,
    pub lhs: Rel,
    pub rhs: Rel,
}

/// Searches for a model over `alphabet` in which `claim` fails.
pub fn find_countermodel(
    claim: &Claim,
    alphabet: &Alphabet,
    search: &Search,
) -> Result<Option<Countermodel>, ModelError> {
    match *search {
        Search::Exhaustive { max_states, top } => {
            for n in 1..=max_states {
                let space = ModelSpace::new(n, alphabet, top)?;
                // surfaces evaluation errors before the parallel sweep
                claim.check(&space.model(0))?;
                for w in 0..=space.bits() {
                    let masks = space.masks_of_weight(w);
                    let hit = masks.par_iter().find_first(|&&mask| {
                        !claim.check(&space.model(mask)).map(|(holds, _, _)| holds).unwrap_or(true)
                    });
                    if let Some(&mask) = hit {
                        let model = space.model(mask);
                        let (_, lhs, rhs) = claim.check(&model)?;
                        return Ok(Some(Countermodel { model, lhs, rhs }));
                    }
                }
            }
            Ok(None)
        }
        Search::Random { states, count, density, top, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let model = random_model_with(&mut rng, states, alphabet, top, density)?;
                let (holds, lhs, rhs) = claim.check(&model)?;
                if !holds {
                    return Ok(Some(Countermodel { model, lhs, rhs }));
                }
            }
            Ok(None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn alpha(actions: &[&str], tests: &[&str]) -> Alphabet {
        Alphabet::new(actions.iter().copied(), tests.iter().copied()).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_models(2, &alpha(&["p"], &[])).unwrap().iter().count(), 16);
        assert_eq!(enumerate_models(1, &alpha(&["p"], &[])).unwrap().iter().count(), 2);
        let space = enumerate_models(2, &alpha(&["p"], &["b"])).unwrap();
        let models: Vec<_> = space.iter().collect();
        assert_eq!(models.len(), 64);
        let distinct: std::collections::HashSet<_> = models.iter().cloned().collect();
        assert_eq!(distinct.len(), 64);
        assert!(ModelSpace::new(3, &alpha(&["p", "q", "r"], &[]), TopKind::Full).is_err());
    }

    #[test]
    fn random_models_are_reproducible() {
        let a = alpha(&["p", "q"], &["b"]);
        let m1 = random_model(3, &a, TopKind::Closure, 0.4, 11).unwrap();
        let m2 = random_model(3, &a, TopKind::Closure, 0.4, 11).unwrap();
        assert_eq!(m1, m2);
        let empty = random_model(3, &a, TopKind::Full, 0.0, 5).unwrap();
        assert!(empty.actions().values().all(Rel::is_empty));
        assert_eq!(empty.top(), Rel::full(3));
        assert!(random_model(3, &a, TopKind::Full, 1.5, 5).is_err());
    }

    #[test]
    fn countermodel_examples() {
        let a = alpha(&["p", "q"], &[]);
        let t = |s: &str| parse_term(s, &a).unwrap();
        let found = find_countermodel(
            &Claim::eq(t("p"), t("p;p")),
            &alpha(&["p"], &[]),
            &Search::Exhaustive { max_states: 2, top: TopKind::Full },
        )
        .unwrap()
        .unwrap();
        assert_eq!(found.model.action("p").unwrap().pairs(), vec![(0, 1)]);
        assert!(found.rhs.is_empty());
        let none = find_countermodel(
            &Claim::eq(Term::One, Term::One),
            &a,
            &Search::Exhaustive { max_states: 2, top: TopKind::Full },
        )
        .unwrap();
        assert!(none.is_none());
    }
}
