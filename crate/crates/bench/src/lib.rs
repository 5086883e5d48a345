//! Fixtures shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use topkat::gen::{random_term_of_size, rewrite_once, Grammar, TermGen};
use topkat::{parse_term, Alphabet, Term};

/// A named equation to decide.
pub struct Query {
    pub name: String,
    pub alphabet: Alphabet,
    pub left: Term,
    pub right: Term,
}

fn query(name: &str, actions: &[&str], tests: &[&str], l: &str, r: &str) -> Query {
    let alphabet = Alphabet::new(actions.iter().copied(), tests.iter().copied()).unwrap();
    Query {
        name: name.to_string(),
        left: parse_term(l, &alphabet).unwrap(),
        right: parse_term(r, &alphabet).unwrap(),
        alphabet,
    }
}

/// The alphabet of the size-60 workloads: four actions, three tests.
pub fn wide_alphabet() -> Alphabet {
    Alphabet::new(["p", "q", "r", "s"], ["b", "c", "d"]).unwrap()
}

/// Small fixed queries, including the pair separating TopKAT from its
/// relational models.
pub fn pinned() -> Vec<Query> {
    vec![
        query("incompleteness", &["p"], &[], "top;p", "top;p;top;p"),
        query("star-unfold", &["p"], &["b"], "(b;p)*", "1 + b;p;(b;p)*"),
        query("denesting", &["p", "q"], &[], "(p + q)*", "p*;(q;p*)*"),
        query("sliding", &["p", "q"], &["b"], "b;p;(q;b;p)*", "(b;p;q)*;b;p"),
    ]
}

/// `(p+q)*;p;(p+q)^k` against a sum that forces a subset-construction
/// blowup on the right.
pub fn blowup(k: usize) -> Query {
    assert!(k >= 1);
    let tail = |n: usize| vec!["(p + q)"; n].join(";");
    let l = format!("(p + q)*;p;{}", tail(k));
    let r = format!("{l} + (p + q)*;p;p;{}", tail(k - 1));
    query(&format!("blowup-{k}"), &["p", "q"], &[], &l, &r)
}

/// Random pairs of the given size over [`wide_alphabet`]: an independent
/// pair, then a term against a chain of law rewrites of itself (which is
/// equal, so the engine explores the whole product).
pub fn random_pair(size: usize, seed: u64) -> (Query, Query) {
    let alphabet = wide_alphabet();
    let gen = TermGen::new(Grammar::new(&alphabet, true, false), size);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let independent = Query {
        name: format!("independent-{size}"),
        left: random_term_of_size(&mut rng, &gen, size),
        right: random_term_of_size(&mut rng, &gen, size),
        alphabet: alphabet.clone(),
    };
    let base = random_term_of_size(&mut rng, &gen, size * 5 / 6);
    let mut other = base.clone();
    for _ in 0..20 {
        let next = rewrite_once(&mut rng, &other);
        if next.size() <= size {
            other = next;
        }
    }
    let rewritten = Query { name: format!("rewritten-{size}"), left: base, right: other, alphabet };
    (independent, rewritten)
}
