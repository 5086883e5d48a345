//! The pinned example suite: concrete terms, triples and models whose
//! verdicts are fixed in advance. Each demo reports a list of checks with
//! the expected and the observed outcome.
//!
//! Integer examples run on the carrier `-2..=2`, state `i` standing for
//! `x = i - 2`.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{decide_equal, decide_leq};
use crate::gen::{random_pair, Grammar, TermGen};
use crate::logic::{check_triple_equational, encode, parse_triple, triple_holds_in, Form, LogicError};
use crate::relmodels::{
    eval_term, find_countermodel, model_to_json, Claim, ClaimKind, ModelError, ModelSpace, Rel, RelationalModel, Search,
    TopKind,
};
use crate::syntax::{parse_term, Alphabet, Term};

/// One expectation and what was observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub expected: String,
    pub observed: String,
}

impl Check {
    pub fn new(label: impl Into<String>, expected: impl ToString, observed: impl ToString) -> Check {
        Check { label: label.into(), expected: expected.to_string(), observed: observed.to_string() }
    }

    pub fn passed(&self) -> bool {
        self.expected == self.observed
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed() { "ok  " } else { "FAIL" };
        write!(f, "{mark} {}: {}", self.label, self.observed)?;
        if !self.passed() {
            write!(f, " (expected {})", self.expected)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Demo {
    pub name: &'static str,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl Demo {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn first_divergence(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed())
    }
}

impl fmt::Display for Demo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({})", self.name, self.title)?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

fn verdict(v: bool) -> &'static str {
    if v {
        "holds"
    } else {
        "fails"
    }
}

fn engine(v: bool) -> &'static str {
    if v {
        "Equal"
    } else {
        "NotEqual"
    }
}

fn proven(v: bool) -> &'static str {
    if v {
        "Valid"
    } else {
        "Unproven"
    }
}

fn term(s: &str, a: &Alphabet) -> Result<Term, LogicError> {
    Ok(parse_term(s, a)?)
}

type IntAction<'a> = (&'a str, &'a dyn Fn(i32) -> Option<i32>);
type IntTest<'a> = (&'a str, &'a dyn Fn(i32) -> bool);

fn integers(actions: &[IntAction], tests: &[IntTest]) -> Result<RelationalModel, ModelError> {
    let xs = -2..=2;
    let idx = |x: i32| (x + 2) as usize;
    let acts: Vec<(&str, Vec<(usize, usize)>)> = actions
        .iter()
        .map(|(name, f)| (*name, xs.clone().filter_map(|x| f(x).filter(|y| (-2..=2).contains(y)).map(|y| (idx(x), idx(y)))).collect()))
        .collect();
    let tsts: Vec<(&str, Vec<usize>)> =
        tests.iter().map(|(name, f)| (*name, xs.clone().filter(|&x| f(x)).map(idx).collect())).collect();
    let acts: Vec<(&str, &[(usize, usize)])> = acts.iter().map(|(n, v)| (*n, v.as_slice())).collect();
    let tsts: Vec<(&str, &[usize])> = tsts.iter().map(|(n, v)| (*n, v.as_slice())).collect();
    RelationalModel::from_lists(5, &acts, &tsts, None)
}

/// `top;p = top;p;top;p` and `p ≤ p;top;p` hold in every relational TopKAT
/// but not in every TopKAT.
pub fn incompleteness() -> Result<Demo, LogicError> {
    let a = Alphabet::new(["p"], Vec::<String>::new())?;
    let mut checks = Vec::new();
    let claims = [
        ("top;p = top;p;top;p", Claim::eq(term("top;p", &a)?, term("top;p;top;p", &a)?)),
        ("p ≤ p;top;p", Claim::leq(term("p", &a)?, term("p;top;p", &a)?)),
    ];
    for (label, claim) in &claims {
        let v = match claim.kind {
            ClaimKind::Eq => decide_equal(&claim.lhs, &claim.rhs, &a)?,
            ClaimKind::Leq => decide_leq(&claim.lhs, &claim.rhs, &a)?,
        };
        checks.push(Check::new(format!("engine {label}"), "NotEqual", engine(v.is_equal())));
        for n in [2, 3] {
            let found = find_countermodel(claim, &a, &Search::Exhaustive { max_states: n, top: TopKind::Full })?;
            checks.push(Check::new(
                format!("full-top countermodel to {label}, n ≤ {n}"),
                "none",
                found.map_or("none".to_string(), |c| model_to_json(&c.model).to_string()),
            ));
        }
    }
    let m = incompleteness_model();
    let tp = eval_term(&m, &term("top;p", &a)?)?;
    let tptp = eval_term(&m, &term("top;p;top;p", &a)?)?;
    checks.push(Check::new("explicit top: top;p", "{(0,1)}", tp));
    checks.push(Check::new("explicit top: top;p;top;p", "{}", tptp));
    let ptp = eval_term(&m, &term("p;top;p", &a)?)?;
    checks.push(Check::new("explicit top: p ≤ p;top;p", "fails", verdict(m.action("p").unwrap().is_subset(&ptp))));
    Ok(Demo { name: "incompleteness", title: "relational validities the theory does not prove", checks })
}

/// Two states, top `{(0,0),(1,1),(0,1)}`, `p = {(0,1)}`.
pub fn incompleteness_model() -> RelationalModel {
    RelationalModel::from_lists(2, &[("p", &[(0, 1)])], &[], Some(&[(0, 0), (1, 1), (0, 1)]))
        .expect("lawful top")
}

/// With a top smaller than the complete relation, equal codomains no longer
/// give equal `top;p`, and `top;b;p ≥ c` no longer tracks the triple.
pub fn grel_codomain() -> Result<Demo, LogicError> {
    let m = RelationalModel::from_lists(
        2,
        &[("p", &[(0, 1)]), ("q", &[(1, 1)])],
        &[("b", &[0, 1]), ("c", &[1])],
        Some(&[(0, 0), (1, 1), (0, 1)]),
    )?;
    let a = m.alphabet();
    let (p, q) = (m.action("p").unwrap(), m.action("q").unwrap());
    let tp = eval_term(&m, &term("top;p", &a)?)?;
    let tq = eval_term(&m, &term("top;q", &a)?)?;
    let mut checks = vec![
        Check::new("codomain(p) = codomain(q)", "holds", verdict(p.codomain() == q.codomain())),
        Check::new("top;p", "{(0,1)}", &tp),
        Check::new("top;q", "{(0,1),(1,1)}", &tq),
        Check::new("top;p = top;q", "fails", verdict(tp == tq)),
    ];
    let tr = parse_triple("[b] p [ok: c]", &a)?;
    checks.push(Check::new("[b] p [ok: c] by codomains", "holds", verdict(triple_holds_in(&m, &tr)?)));
    let enc = encode(&tr, Form::F2)?;
    checks.push(Check::new(format!("{enc}"), "fails", verdict(enc.holds_in(&m)?)));
    Ok(Demo { name: "grel-codomain", title: "codomain encoding under a smaller top", checks })
}

/// Candidate top-free encodings of `[b] p [ok: c]`, written as equations.
pub const KAT_CANDIDATES: [(&str, &str); 9] = [
    ("b;p;~c", "0"),
    ("b;p", "0"),
    ("b;p", "b;p;c"),
    ("c + b;p", "b;p"),
    ("c;b;p", "c"),
    ("b;p;c", "c"),
    ("p;c", "c"),
    ("c + b;p;c", "b;p;c"),
    ("b;p;c + c", "b;p + c"),
];

/// The two valuations separating KAT from incorrectness: `p = {(0,1)}`
/// and `p = ∅`, with `b = {0}` and `c = {1}` in both.
pub fn separation_models() -> (RelationalModel, RelationalModel) {
    let u = RelationalModel::from_lists(2, &[("p", &[(0, 1)])], &[("b", &[0]), ("c", &[1])], None).expect("valid model");
    let u0 = u.with_action("p", Rel::empty(2)).expect("valid model");
    (u, u0)
}

/// How an equation's truth moves from `u` to `u∅` compared with the triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tracking {
    /// Same truth value in both models.
    Unchanged,
    /// False under `u`, true under `u∅`: the opposite of the triple.
    Mistracking,
    /// True under `u`, false under `u∅`, like the triple.
    Tracking,
}

impl fmt::Display for Tracking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tracking::Unchanged => "unchanged",
            Tracking::Mistracking => "mistracking",
            Tracking::Tracking => "tracking",
        })
    }
}

pub fn tracking(lhs: &Term, rhs: &Term) -> Result<Tracking, ModelError> {
    let (u, u0) = separation_models();
    let holds = |m: &RelationalModel| -> Result<bool, ModelError> { Ok(eval_term(m, lhs)? == eval_term(m, rhs)?) };
    Ok(match (holds(&u)?, holds(&u0)?) {
        (true, false) => Tracking::Tracking,
        (false, true) => Tracking::Mistracking,
        _ => Tracking::Unchanged,
    })
}

/// The triple flips between the two valuations while no top-free equation
/// does in the same direction; the top encoding does.
pub fn kat_separation(random_pairs: usize, seed: u64) -> Result<Demo, LogicError> {
    let (u, u0) = separation_models();
    let a = u.alphabet();
    let tr = parse_triple("[b] p [ok: c]", &a)?;
    let mut checks = vec![
        Check::new("triple under u", "holds", verdict(triple_holds_in(&u, &tr)?)),
        Check::new("triple under u∅", "fails", verdict(triple_holds_in(&u0, &tr)?)),
    ];
    for (l, r) in KAT_CANDIDATES {
        let tr = tracking(&term(l, &a)?, &term(r, &a)?)?;
        let observed = if tr == Tracking::Tracking { "tracking".to_string() } else { "not tracking".to_string() };
        checks.push(Check::new(format!("{l} = {r}: {tr}"), "not tracking", observed));
    }
    let gen = TermGen::new(Grammar::new(&a, false, false), 10);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracked = 0;
    for _ in 0..random_pairs {
        let (l, r, _) = random_pair(&mut rng, &gen);
        if tracking(&l, &r)? == Tracking::Tracking {
            tracked += 1;
        }
    }
    checks.push(Check::new(format!("random top-free equations that track ({random_pairs}, seed {seed})"), 0, tracked));
    for form in Form::INCORRECTNESS {
        let enc = encode(&tr, form)?;
        let t = match (enc.holds_in(&u)?, enc.holds_in(&u0)?) {
            (true, false) => Tracking::Tracking,
            (false, true) => Tracking::Mistracking,
            _ => Tracking::Unchanged,
        };
        checks.push(Check::new(format!("{form}: {enc}"), Tracking::Tracking, t));
    }
    Ok(Demo { name: "kat-separation", title: "top-free equations cannot follow the triple", checks })
}

/// `[x<0] if x<0 then skip else x:=-x [ok: x<0]`.
pub fn abs_value() -> Result<Demo, LogicError> {
    let a = Alphabet::new(["neg"], ["lt0"])?;
    let tr = parse_triple("[lt0] lt0;1 + ~lt0;neg [ok: lt0]", &a)?;
    let mut checks = Vec::new();
    for form in Form::INCORRECTNESS {
        checks.push(Check::new(format!("{form}"), "Valid", proven(check_triple_equational(&tr, form, &a)?.is_valid())));
    }
    let m = integers(&[("neg", &|x| Some(-x))], &[("lt0", &|x| x < 0)])?;
    checks.push(Check::new("on -2..2", "holds", verdict(triple_holds_in(&m, &tr)?)));
    Ok(Demo { name: "abs-value", title: "incorrect absolute value reaches every negative", checks })
}

/// `x ≥ 0` is the strongest postcondition of `while x<0 do x:=x+1` from
/// `true`: the incorrectness and the Hoare triple both hold.
pub fn strongest_post() -> Result<Demo, LogicError> {
    let a = Alphabet::new(["inc"], ["lt0"])?;
    let prog = "(lt0;inc)*;~lt0";
    let il = parse_triple(&format!("[1] {prog} [ok: ~lt0]"), &a)?;
    let hl = parse_triple(&format!("{{1}} {prog} {{~lt0}}"), &a)?;
    let mut checks = Vec::new();
    for form in Form::INCORRECTNESS {
        checks.push(Check::new(format!("incorrectness {form}"), "Valid", proven(check_triple_equational(&il, form, &a)?.is_valid())));
    }
    for form in Form::HOARE {
        checks.push(Check::new(format!("hoare {form}"), "Valid", proven(check_triple_equational(&hl, form, &a)?.is_valid())));
    }
    let m = integers(&[("inc", &|x| Some(x + 1))], &[("lt0", &|x| x < 0)])?;
    checks.push(Check::new("incorrectness on -2..2", "holds", verdict(triple_holds_in(&m, &il)?)));
    checks.push(Check::new("hoare on -2..2", "holds", verdict(triple_holds_in(&m, &hl)?)));
    Ok(Demo { name: "strongest-post", title: "an incorrectness and a Hoare triple pin the postcondition", checks })
}

/// If `c ≥ ~b` then `[c] while b do p [ok: ~b]` and `{c} while b do p {~b}`.
/// The hypothesis is built in by writing the precondition as `d + ~b`.
pub fn generalized_while() -> Result<Demo, LogicError> {
    let a = Alphabet::new(["p"], ["b", "d"])?;
    let prog = "(b;p)*;~b";
    let il = parse_triple(&format!("[d + ~b] {prog} [ok: ~b]"), &a)?;
    let hl = parse_triple(&format!("{{d + ~b}} {prog} {{~b}}"), &a)?;
    let mut checks = Vec::new();
    for form in Form::INCORRECTNESS {
        checks.push(Check::new(format!("incorrectness {form}"), "Valid", proven(check_triple_equational(&il, form, &a)?.is_valid())));
    }
    for form in Form::HOARE {
        checks.push(Check::new(format!("hoare {form}"), "Valid", proven(check_triple_equational(&hl, form, &a)?.is_valid())));
    }
    // without the hypothesis the incorrectness triple is not a theorem
    let bare = parse_triple(&format!("[d] {prog} [ok: ~b]"), &a)?;
    checks.push(Check::new("[d] without d ≥ ~b", "Unproven", proven(check_triple_equational(&bare, Form::F2, &a)?.is_valid())));
    let mut broken = 0;
    for m in ModelSpace::new(2, &a, TopKind::Full)?.iter() {
        if !triple_holds_in(&m, &il)? || !triple_holds_in(&m, &hl)? {
            broken += 1;
        }
    }
    checks.push(Check::new("models at n=2 violating either triple", 0, broken));
    Ok(Demo { name: "generalized-while", title: "strongest postcondition of any loop with c ≥ ~b", checks })
}

/// `[1] while x≥0 do (if x≤0 then error else p) [er: x=0]`.
pub fn error_in_loop() -> Result<Demo, LogicError> {
    let a = Alphabet::new(["p"], ["b", "c", "d"])?;
    let prog = "(b;(c;fail + ~c;p))*;~b";
    let tr = parse_triple(&format!("[1] {prog} [er: d]"), &a)?;
    let m = integers(&[("p", &|x| Some(x - 1))], &[("b", &|x| x >= 0), ("c", &|x| x <= 0), ("d", &|x| x == 0)])?;
    let mut checks = vec![Check::new("on -2..2 with p = x:=x-1", "holds", verdict(triple_holds_in(&m, &tr)?))];
    let inc = integers(&[("p", &|x| Some(x + 1))], &[])?.action("p").unwrap().clone();
    for (name, p) in [("p = ∅", Rel::empty(5)), ("p = x:=x+1", inc)] {
        let m2 = m.with_action("p", p)?;
        checks.push(Check::new(format!("on -2..2 with {name}"), "holds", verdict(triple_holds_in(&m2, &tr)?)));
    }
    // the step x≥0 ∧ x≤0 = x=0 is a domain fact: substitute d by b;c
    let fact = parse_triple(&format!("[1] {prog} [er: b;c]"), &a)?;
    checks.push(Check::new("with d := b;c", "Valid", proven(check_triple_equational(&fact, Form::F2, &a)?.is_valid())));
    checks.push(Check::new("with d free", "Unproven", proven(check_triple_equational(&tr, Form::F2, &a)?.is_valid())));
    Ok(Demo { name: "error-in-loop", title: "an error reached inside a loop", checks })
}

/// `[x>0] if x<0 then skip else x:=-x [ok: x<0]` from the assignment
/// instance `top;(x>0);(x:=-x) ≥ (x<0)`.
pub fn assignment() -> Result<Demo, LogicError> {
    let m = integers(&[("a", &|x| Some(-x))], &[("gt0", &|x| x > 0), ("lt0", &|x| x < 0)])?;
    let a = m.alphabet();
    let hyp = parse_triple("[gt0] a [ok: lt0]", &a)?;
    let goal = parse_triple("[gt0] lt0;1 + ~lt0;a [ok: lt0]", &a)?;
    let mut checks = vec![
        Check::new("hypothesis top;gt0;a ≥ lt0 on -2..2", "holds", verdict(encode(&hyp, Form::F2)?.holds_in(&m)?)),
        Check::new("goal on -2..2", "holds", verdict(triple_holds_in(&m, &goal)?)),
        Check::new("goal without the hypothesis", "Unproven", proven(check_triple_equational(&goal, Form::F2, &a)?.is_valid())),
    ];
    // x>0 ≤ ~(x<0) is built in by writing gt0 as g;~lt0
    let b = Alphabet::new(["a"], ["g", "lt0"])?;
    let step = decide_leq(
        &term("top;g;~lt0;a", &b)?,
        &term("top;g;~lt0;(lt0;1 + ~lt0;a)", &b)?,
        &b,
    )?;
    checks.push(Check::new("top;gt0;a ≤ top;gt0;(lt0;1 + ~lt0;a)", "Equal", engine(step.is_equal())));
    Ok(Demo { name: "assignment", title: "reasoning from an assignment instance", checks })
}

/// Default size and seed of the random part of [`kat_separation`].
pub const SEPARATION_PAIRS: usize = 1000;
pub const SEPARATION_SEED: u64 = 7;

/// Every pinned demo, in a fixed order.
pub fn all() -> Result<Vec<Demo>, LogicError> {
    all_with(SEPARATION_PAIRS, SEPARATION_SEED)
}

pub fn all_with(random_pairs: usize, seed: u64) -> Result<Vec<Demo>, LogicError> {
    Ok(vec![
        incompleteness()?,
        grel_codomain()?,
        kat_separation(random_pairs, seed)?,
        abs_value()?,
        strongest_post()?,
        generalized_while()?,
        error_in_loop()?,
        assignment()?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_demo_reproduces() {
        for d in all().unwrap() {
            assert!(d.passed(), "{d}");
        }
    }

    #[test]
    fn tracking_classification() {
        let a = separation_models().0.alphabet();
        let t = |s: &str| parse_term(s, &a).unwrap();
        assert_eq!(tracking(&t("p"), &t("0")).unwrap(), Tracking::Mistracking);
        assert_eq!(tracking(&t("b"), &t("b")).unwrap(), Tracking::Unchanged);
        assert_eq!(tracking(&t("top;b;p;c"), &t("top;c")).unwrap(), Tracking::Tracking);
    }
}
