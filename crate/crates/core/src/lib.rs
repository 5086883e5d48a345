//! TopKAT: Kleene algebra with tests and a top element.
//!
//! The crate decides equations of KAT, TopKAT and FailTopKAT terms, encodes
//! Hoare and incorrectness triples as such equations, and evaluates terms in
//! finite relational models, which serve both as an independent oracle and
//! as a search space for countermodels.

pub mod atoms;
pub mod demos;
pub mod engine;
pub mod failtopkat;
pub mod gen;
pub mod logic;
pub mod relmodels;
pub mod syntax;

pub use atoms::{Atom, GuardedAlphabet, GuardedString, Side};
pub use engine::{decide_equal, decide_leq, EngineError, Verdict, Witness};
pub use failtopkat::{decide_fail_equal, decide_fail_leq, split, ErrorCode, FailVerdict};
pub use logic::{check_triple_equational, parse_triple, Form, LogicError, Triple, TripleVerdict};
pub use relmodels::{eval_term, ModelError, Rel, RelationalModel, TopSpec};
pub use syntax::{parse_term, print_term, Alphabet, SyntaxError, Term, TermKind};
