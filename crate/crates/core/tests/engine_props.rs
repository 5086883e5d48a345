mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use topkat::engine::{decide_equal, decide_leq, reduce_top};
use topkat::gen::rewrite_once;
use topkat::relmodels::{eval_term, TopKind};
use topkat::Term;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reflexive(t in common::topkat_term()) {
        prop_assert!(decide_equal(&t, &t, &common::alphabet()).unwrap().is_equal());
    }

    #[test]
    fn verdicts_are_symmetric(a in common::topkat_term(), b in common::topkat_term()) {
        let ab = decide_equal(&a, &b, &common::alphabet()).unwrap();
        let ba = decide_equal(&b, &a, &common::alphabet()).unwrap();
        prop_assert_eq!(ab.is_equal(), ba.is_equal());
    }

    #[test]
    fn rewrites_are_equal(t in common::topkat_term(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut r = t.clone();
        for _ in 0..3 {
            r = rewrite_once(&mut rng, &r);
        }
        prop_assert!(decide_equal(&t, &r, &common::alphabet()).unwrap().is_equal(), "{} vs {}", t, r);
    }

    #[test]
    fn sum_is_an_upper_bound(a in common::topkat_term(), b in common::topkat_term()) {
        let s = a.clone().plus(b.clone());
        prop_assert!(decide_leq(&a, &s, &common::alphabet()).unwrap().is_equal());
        prop_assert!(decide_leq(&b, &s, &common::alphabet()).unwrap().is_equal());
    }

    #[test]
    fn top_is_greatest_and_idempotent(t in common::topkat_term()) {
        let a = common::alphabet();
        prop_assert!(decide_leq(&t, &Term::Top, &a).unwrap().is_equal());
        prop_assert!(decide_equal(&Term::Top.seq(Term::Top), &Term::Top, &a).unwrap().is_equal());
        prop_assert!(decide_equal(&Term::Top.star(), &Term::Top, &a).unwrap().is_equal());
    }

    #[test]
    fn top_free_terms_are_not_reduced(t in common::kat_term()) {
        let actions: BTreeSet<String> = ["p", "q"].into_iter().map(String::from).collect();
        let r = reduce_top(&t, &actions).unwrap();
        prop_assert!(!r.had_top);
        prop_assert_eq!(r.term, t);
    }

    #[test]
    fn equal_verdicts_hold_in_models(
        a in common::topkat_term(),
        b in common::topkat_term(),
        full in common::model(TopKind::Full),
        closure in common::model(TopKind::Closure),
    ) {
        if decide_equal(&a, &b, &common::alphabet()).unwrap().is_equal() {
            for m in [&full, &closure] {
                prop_assert_eq!(eval_term(m, &a).unwrap(), eval_term(m, &b).unwrap());
            }
        }
    }

    #[test]
    fn leq_verdicts_hold_in_models(a in common::topkat_term(), b in common::topkat_term(), m in common::model(TopKind::Closure)) {
        if decide_leq(&a, &b, &common::alphabet()).unwrap().is_equal() {
            prop_assert!(eval_term(&m, &a).unwrap().is_subset(&eval_term(&m, &b).unwrap()));
        }
    }
}
