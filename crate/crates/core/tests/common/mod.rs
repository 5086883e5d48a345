#![allow(dead_code)]

use proptest::prelude::*;
use topkat::relmodels::{random_model, RelationalModel, TopKind};
use topkat::{Alphabet, Term};

pub fn alphabet() -> Alphabet {
    Alphabet::new(["p", "q"], ["b", "c"]).unwrap()
}

pub fn test_term() -> BoxedStrategy<Term> {
    let leaf = prop_oneof![Just(Term::Zero), Just(Term::One), Just(Term::test("b")), Just(Term::test("c"))];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.plus(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.seq(b)),
            inner.prop_map(Term::not),
        ]
    })
    .boxed()
}

fn star_valid(t: Term) -> Term {
    // a star over a compound test is rejected by validation; `1*` stands in
    if t.is_test_only() && !matches!(t, Term::Zero | Term::One) {
        Term::One.star()
    } else {
        t.star()
    }
}

/// Valid terms over [`alphabet`], optionally with `top` and `fail`.
pub fn term_with(top: bool, fail: bool, depth: u32, size: u32) -> BoxedStrategy<Term> {
    let mut leaves = vec![Just(Term::act("p")).boxed(), Just(Term::act("q")).boxed(), test_term()];
    if top {
        leaves.push(Just(Term::Top).boxed());
    }
    if fail {
        leaves.push(Just(Term::Fail).boxed());
    }
    proptest::strategy::Union::new(leaves)
        .prop_recursive(depth, size, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.plus(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.seq(b)),
                inner.prop_map(star_valid),
            ]
        })
        .boxed()
}

pub fn kat_term() -> BoxedStrategy<Term> {
    term_with(false, false, 4, 12)
}

pub fn topkat_term() -> BoxedStrategy<Term> {
    term_with(true, false, 4, 12)
}

pub fn fail_term() -> BoxedStrategy<Term> {
    term_with(true, true, 4, 12)
}

/// A seeded random model over [`alphabet`] with 1 to 4 states.
pub fn model(top: TopKind) -> BoxedStrategy<RelationalModel> {
    (1usize..=4, any::<u64>(), 0.1f64..0.6)
        .prop_map(move |(n, seed, density)| random_model(n, &alphabet(), top, density, seed).unwrap())
        .boxed()
}
