//! Catalog of proof rules for propositional Hoare logic (figure 1),
//! incorrectness logic with normal termination (figure 3) and incorrectness
//! logic with errors (figure 5), and their soundness checks.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{decide_encoding, encode, triple_holds_in, Encoding, Form, LogicError, Triple, TripleVerdict};
use crate::failtopkat::eval_fail;
use crate::relmodels::{
    eval_test_set, random_model_with, ModelSpace, Rel, RelationalModel, States, TopKind,
};
use crate::syntax::{occurring_primitives, parse_term, Alphabet, Term};

/// A premise: a triple or an order between tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Premise {
    Triple(Triple),
    Leq(Term, Term),
}

impl std::fmt::Display for Premise {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Premise::Triple(t) => write!(f, "{t}"),
            Premise::Leq(a, b) => write!(f, "{a} ≤ {b}"),
        }
    }
}

/// One instance of a rule schema, for example the `er` case of a rule
/// stated for an arbitrary error code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleVariant {
    pub label: &'static str,
    pub premises: Vec<Premise>,
    pub conclusions: Vec<Triple>,
}

/// Tests `b0..bk` forming a chain along the action term `step`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub tests: Vec<String>,
    pub step: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub figure: u8,
    pub name: &'static str,
    pub alphabet: Alphabet,
    pub variants: Vec<RuleVariant>,
    pub chain: Option<Chain>,
}

impl Rule {
    pub fn id(&self) -> String {
        format!("fig{}/{}", self.figure, self.name.to_ascii_lowercase())
    }

    pub fn premise_free(&self) -> bool {
        self.variants.iter().all(|v| v.premises.is_empty())
    }
}

/// Length of the eventually-constant test chains used for Iter-Dependent.
pub const CHAIN_LENGTH: usize = 4;

struct Builder {
    figure: u8,
    alphabet: Alphabet,
    /// Schema action variables that stand for arbitrary fail terms.
    fail_actions: bool,
}

impl Builder {
    fn new(figure: u8, tests: &[&str]) -> Builder {
        let fail_actions = figure == 5;
        let actions: Vec<String> = if fail_actions {
            vec!["p_ok".into(), "p_er".into(), "q_ok".into(), "q_er".into()]
        } else {
            vec!["p".into(), "q".into()]
        };
        Builder { figure, alphabet: Alphabet::new(actions, tests.iter().copied()).unwrap(), fail_actions }
    }

    fn schema_alphabet(&self) -> Alphabet {
        let tests = self.alphabet.tests().to_vec();
        Alphabet::new(["p", "q"], tests).unwrap()
    }

    /// Replaces schema action `x` by `x_ok + x_er;fail` in figure 5.
    fn instantiate(&self, t: Term) -> Term {
        if !self.fail_actions {
            return t;
        }
        t.map_actions(&|a| {
            Some(Term::act(format!("{a}_ok")).plus(Term::act(format!("{a}_er")).seq(Term::Fail)))
        })
    }

    fn term(&self, s: &str) -> Term {
        self.instantiate(parse_term(s, &self.schema_alphabet()).unwrap())
    }

    fn triple(&self, s: &str) -> Triple {
        let parsed = super::parse_triple(s, &self.schema_alphabet()).unwrap();
        parsed.map_terms(&|t| self.instantiate(t.clone()))
    }

    fn premise(&self, s: &str) -> Premise {
        match s.split_once("<=") {
            Some((a, b)) => Premise::Leq(self.term(a), self.term(b)),
            None => Premise::Triple(self.triple(s)),
        }
    }

    fn variant(&self, label: &'static str, premises: &[&str], conclusions: &[&str]) -> RuleVariant {
        RuleVariant {
            label,
            premises: premises.iter().map(|p| self.premise(p)).collect(),
            conclusions: conclusions.iter().map(|c| self.triple(c)).collect(),
        }
    }

    /// Builds a rule whose alphabet is restricted to the symbols it uses.
    fn rule(&self, name: &'static str, variants: Vec<RuleVariant>) -> Rule {
        let mut actions = BTreeSet::new();
        let mut tests = BTreeSet::new();
        let mut collect = |t: &Term| {
            let (a, b) = occurring_primitives(t);
            actions.extend(a);
            tests.extend(b);
        };
        for v in &variants {
            for p in &v.premises {
                match p {
                    Premise::Triple(tr) => [&tr.pre, &tr.prog, &tr.post].into_iter().for_each(&mut collect),
                    Premise::Leq(a, b) => [a, b].into_iter().for_each(&mut collect),
                }
            }
            for tr in &v.conclusions {
                [&tr.pre, &tr.prog, &tr.post].into_iter().for_each(&mut collect);
            }
        }
        let alphabet = Alphabet::new(
            self.alphabet.actions().iter().filter(|a| actions.contains(*a)).cloned(),
            self.alphabet.tests().iter().filter(|b| tests.contains(*b)).cloned(),
        )
        .unwrap();
        Rule { figure: self.figure, name, alphabet, variants, chain: None }
    }

    fn single(&self, name: &'static str, premises: &[&str], conclusions: &[&str]) -> Rule {
        self.rule(name, vec![self.variant("", premises, conclusions)])
    }

    /// A rule stated for an arbitrary error code: `{e}` in the text is
    /// replaced by `ok` and by `er`.
    fn per_code(&self, name: &'static str, premises: &[&str], conclusions: &[&str]) -> Rule {
        let variants = [("ok", "ok"), ("er", "er")]
            .into_iter()
            .map(|(label, code)| {
                let ps: Vec<String> = premises.iter().map(|p| p.replace("{e}", code)).collect();
                let cs: Vec<String> = conclusions.iter().map(|c| c.replace("{e}", code)).collect();
                let ps: Vec<&str> = ps.iter().map(String::as_str).collect();
                let cs: Vec<&str> = cs.iter().map(String::as_str).collect();
                self.variant(label, &ps, &cs)
            })
            .collect();
        self.rule(name, variants)
    }

    fn chain_rule(&self) -> Rule {
        let names: Vec<String> = (0..=CHAIN_LENGTH).map(|i| format!("b{i}")).collect();
        let mut premises: Vec<String> =
            (0..CHAIN_LENGTH).map(|i| format!("[b{i}] p [ok: b{}]", i + 1)).collect();
        premises.push(format!("[b{CHAIN_LENGTH}] p [ok: b{CHAIN_LENGTH}]"));
        let conclusion = format!("[b0] p* [ok: {}]", names.join(" + "));
        let premises: Vec<&str> = premises.iter().map(String::as_str).collect();
        let mut rule = self.single("Iter-Dependent", &premises, &[conclusion.as_str()]);
        rule.chain = Some(Chain { tests: names, step: self.term("p") });
        rule
    }
}

fn chain_tests() -> Vec<String> {
    (0..=CHAIN_LENGTH).map(|i| format!("b{i}")).collect()
}

fn figure1() -> Vec<Rule> {
    let b = Builder::new(1, &["a", "b", "c", "d", "bp", "cp"]);
    vec![
        b.single("Composition", &["{a} p {b}", "{b} q {c}"], &["{a} p;q {c}"]),
        b.single("Conditional", &["{b;c} p {d}", "{~b;c} q {d}"], &["{c} b;p + ~b;q {d}"]),
        b.single("While", &["{b;c} p {c}"], &["{c} (b;p)*;~b {~b;c}"]),
        b.single("Consequence", &["bp <= b", "{b} p {c}", "c <= cp"], &["{bp} p {cp}"]),
    ]
}

fn figure3() -> Vec<Rule> {
    let b = Builder::new(3, &["a", "b", "c", "bp", "cp", "b1", "b2", "c1", "c2"]);
    let chain = Builder::new(3, &chain_tests().iter().map(String::as_str).collect::<Vec<_>>());
    vec![
        b.single("Empty", &[], &["[b] p [ok: 0]"]),
        b.single("Consequence", &["b <= bp", "[b] p [ok: c]", "cp <= c"], &["[bp] p [ok: cp]"]),
        b.single("Disjunction", &["[b1] p [ok: c1]", "[b2] p [ok: c2]"], &["[b1 + b2] p [ok: c1 + c2]"]),
        b.single("Identity", &[], &["[b] 1 [ok: b]"]),
        b.single("Composition", &["[a] p [ok: b]", "[b] q [ok: c]"], &["[a] p;q [ok: c]"]),
        b.single("Choice-Left", &["[a] p [ok: b]"], &["[a] p + q [ok: b]"]),
        b.single("Choice-Right", &["[a] q [ok: b]"], &["[a] p + q [ok: b]"]),
        b.single("Assume", &[], &["[b] c [ok: b;c]"]),
        b.single("Iter-Zero", &[], &["[b] p* [ok: b]"]),
        b.single("Iter-NonZero", &["[b] p*;p [ok: c]"], &["[b] p* [ok: c]"]),
        chain.chain_rule(),
    ]
}

fn figure5() -> Vec<Rule> {
    let b = Builder::new(5, &["a", "b", "c", "bp", "cp", "b1", "b2", "c1", "c2"]);
    let chain = Builder::new(5, &chain_tests().iter().map(String::as_str).collect::<Vec<_>>());
    vec![
        b.per_code("Empty", &[], &["[b] p [{e}: 0]"]),
        b.per_code("Consequence", &["b <= bp", "[b] p [{e}: c]", "cp <= c"], &["[bp] p [{e}: cp]"]),
        b.per_code("Disjunction", &["[b1] p [{e}: c1]", "[b2] p [{e}: c2]"], &["[b1 + b2] p [{e}: c1 + c2]"]),
        b.single("Identity", &[], &["[b] 1 [ok: b]", "[b] 1 [er: 0]"]),
        b.single("Composition-Fail", &["[a] p [er: b]"], &["[a] p;q [er: b]"]),
        b.per_code("Composition-Normal", &["[a] p [ok: b]", "[b] q [{e}: c]"], &["[a] p;q [{e}: c]"]),
        b.per_code("Choice-Left", &["[b] p [{e}: c]"], &["[b] p + q [{e}: c]"]),
        b.per_code("Choice-Right", &["[b] q [{e}: c]"], &["[b] p + q [{e}: c]"]),
        b.single("Assume", &[], &["[a] b [ok: a;b]", "[a] b [er: 0]"]),
        b.single("Error", &[], &["[b] fail [er: b]"]),
        b.single("Iter-Zero", &[], &["[b] p* [ok: b]"]),
        b.per_code("Iter-NonZero", &["[b] p*;p [{e}: c]"], &["[b] p* [{e}: c]"]),
        chain.chain_rule(),
    ]
}

/// The rules of one figure (1, 3 or 5).
pub fn rules_of_figure(figure: u8) -> Option<Vec<Rule>> {
    match figure {
        1 => Some(figure1()),
        3 => Some(figure3()),
        5 => Some(figure5()),
        _ => None,
    }
}

/// Every rule of figures 1, 3 and 5.
pub fn catalog() -> Vec<Rule> {
    [1, 3, 5].into_iter().flat_map(|f| rules_of_figure(f).unwrap()).collect()
}

/// Models used by the model strategy: every model with
/// `1..=exhaustive_states` states, then `random_count` random models of
/// each size in `random_states`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSweep {
    pub exhaustive_states: usize,
    pub random_states: Vec<usize>,
    pub random_count: usize,
    pub density: f64,
    pub seed: u64,
}

impl Default for ModelSweep {
    fn default() -> Self {
        ModelSweep { exhaustive_states: 2, random_states: vec![3, 4], random_count: 1000, density: 0.4, seed: 7 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    /// Decide the conclusions of a premise-free rule, with schema variables
    /// read as fresh primitives.
    Equational(Form),
    Models(ModelSweep),
}

/// Equational checking in the default form for premise-free rules, the
/// model sweep otherwise.
pub fn strategy_for(rule: &Rule, sweep: &ModelSweep) -> Strategy {
    match rule.variants.iter().flat_map(|v| &v.conclusions).next() {
        Some(c) if rule.premise_free() => Strategy::Equational(Form::default_for(c.style)),
        _ => Strategy::Models(sweep.clone()),
    }
}

/// A model and rule instance where all premises hold but a conclusion fails.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub variant: &'static str,
    pub conclusion: Triple,
    pub model: RelationalModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rule: String,
    pub premise_free: bool,
    /// Decided conclusions (equational strategy).
    pub equations: Vec<(Encoding, TripleVerdict)>,
    /// Rule instances examined (models times variants).
    pub instances: u64,
    pub premises_satisfied: u64,
    pub violations: u64,
    pub first_violation: Option<Violation>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.equations.iter().all(|(_, v)| v.is_valid())
    }
}

#[derive(Default)]
struct Tally {
    instances: u64,
    satisfied: u64,
    violations: u64,
    first: Option<(u64, Violation)>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.instances += other.instances;
        self.satisfied += other.satisfied;
        self.violations += other.violations;
        self.first = match (self.first, other.first) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }
}

fn premise_holds(m: &RelationalModel, p: &Premise) -> Result<bool, LogicError> {
    Ok(match p {
        Premise::Triple(t) => triple_holds_in(m, t)?,
        Premise::Leq(a, b) => {
            let (a, b) = (eval_test_set(m, a)?, eval_test_set(m, b)?);
            a & !b == 0
        }
    })
}

fn check_model(rule: &Rule, m: &RelationalModel, key: u64) -> Result<Tally, LogicError> {
    let mut tally = Tally::default();
    for v in &rule.variants {
        tally.instances += 1;
        let mut premises_hold = true;
        for p in &v.premises {
            if !premise_holds(m, p)? {
                premises_hold = false;
                break;
            }
        }
        if !premises_hold {
            continue;
        }
        tally.satisfied += 1;
        for c in &v.conclusions {
            if !triple_holds_in(m, c)? {
                tally.violations += 1;
                if tally.first.is_none() {
                    tally.first = Some((key, Violation { variant: v.label, conclusion: c.clone(), model: m.clone() }));
                }
                break;
            }
        }
    }
    Ok(tally)
}

fn post_image(step: &Rel, set: States) -> States {
    Rel::diagonal(step.size(), set).compose(step).codomain()
}

/// Rewrites the chain tests of `m` so that `b(i+1)` is a random subset of
/// the image of `b(i)` and the last test is contained in its own image.
fn bias_chain<R: Rng>(rng: &mut R, chain: &Chain, m: RelationalModel) -> Result<RelationalModel, LogicError> {
    let (step, _) = eval_fail(&m, &chain.step)?;
    let mut current = m.test(&chain.tests[0]).unwrap_or(0);
    let mut model = m;
    for (i, name) in chain.tests.iter().enumerate().skip(1) {
        let image = post_image(&step, current);
        let mut next = 0;
        for s in crate::relmodels::states_of(image) {
            if rng.gen_bool(0.75) {
                next |= 1 << s;
            }
        }
        if i == chain.tests.len() - 1 {
            // largest subset contained in its own image
            loop {
                let shrunk = next & post_image(&step, next);
                if shrunk == next {
                    break;
                }
                next = shrunk;
            }
        }
        model = model.with_test(name, next)?;
        current = next;
    }
    Ok(model)
}

fn sweep(rule: &Rule, cfg: &ModelSweep) -> Result<Tally, LogicError> {
    let mut total = Tally::default();
    let mut offset = 0u64;
    for n in 1..=cfg.exhaustive_states {
        let space = ModelSpace::new(n, &rule.alphabet, TopKind::Full)?;
        let tally = (0..space.len())
            .into_par_iter()
            .map(|mask| check_model(rule, &space.model(mask), offset + mask))
            .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
        total = total.merge(tally);
        offset += space.len();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for &n in &cfg.random_states {
        let mut models = Vec::with_capacity(cfg.random_count);
        for _ in 0..cfg.random_count {
            let m = random_model_with(&mut rng, n, &rule.alphabet, TopKind::Full, cfg.density)?;
            models.push(match &rule.chain {
                Some(chain) => bias_chain(&mut rng, chain, m)?,
                None => m,
            });
        }
        let tally = models
            .par_iter()
            .enumerate()
            .map(|(i, m)| check_model(rule, m, offset + i as u64))
            .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
        total = total.merge(tally);
        offset += models.len() as u64;
    }
    Ok(total)
}

/// Checks one rule. The equational strategy only applies to premise-free
/// rules.
pub fn check_rule(rule: &Rule, strategy: &Strategy) -> Result<Report, LogicError> {
    let mut report = Report {
        rule: rule.id(),
        premise_free: rule.premise_free(),
        equations: Vec::new(),
        instances: 0,
        premises_satisfied: 0,
        violations: 0,
        first_violation: None,
    };
    match strategy {
        Strategy::Equational(form) => {
            if !rule.premise_free() {
                return Err(LogicError::PremisedRule(rule.id()));
            }
            for v in &rule.variants {
                for c in &v.conclusions {
                    let enc = encode(c, *form)?;
                    let verdict = decide_encoding(&enc, &rule.alphabet)?;
                    report.equations.push((enc, verdict));
                }
            }
        }
        Strategy::Models(cfg) => {
            let tally = sweep(rule, cfg)?;
            report.instances = tally.instances;
            report.premises_satisfied = tally.satisfied;
            report.violations = tally.violations;
            report.first_violation = tally.first.map(|(_, v)| v);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_shape() {
        let names = |f: u8| -> Vec<&str> { rules_of_figure(f).unwrap().iter().map(|r| r.name).collect() };
        assert_eq!(names(1), ["Composition", "Conditional", "While", "Consequence"]);
        assert_eq!(names(3).len(), 11);
        assert_eq!(names(5).len(), 13);
        let free: Vec<String> = catalog().iter().filter(|r| r.premise_free()).map(Rule::id).collect();
        assert_eq!(
            free,
            [
                "fig3/empty",
                "fig3/identity",
                "fig3/assume",
                "fig3/iter-zero",
                "fig5/empty",
                "fig5/identity",
                "fig5/assume",
                "fig5/error",
                "fig5/iter-zero"
            ]
        );
    }

    #[test]
    fn identity_is_equationally_valid() {
        let rule = rules_of_figure(3).unwrap().into_iter().find(|r| r.name == "Identity").unwrap();
        let report = check_rule(&rule, &Strategy::Equational(Form::F2)).unwrap();
        assert!(report.passed());
        assert_eq!(report.equations[0].0.to_string(), "top;b;1 ≥ b");
    }

    #[test]
    fn premised_rules_need_models() {
        let rule = rules_of_figure(3).unwrap().into_iter().find(|r| r.name == "Composition").unwrap();
        assert!(matches!(check_rule(&rule, &Strategy::Equational(Form::F2)), Err(LogicError::PremisedRule(_))));
        let sweep = ModelSweep { exhaustive_states: 2, random_states: vec![3], random_count: 50, ..Default::default() };
        let report = check_rule(&rule, &Strategy::Models(sweep)).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.premises_satisfied > 0);
    }

    #[test]
    fn a_wrong_rule_is_caught() {
        let b = Builder::new(3, &["a", "b", "c"]);
        // backwards composition is unsound
        let rule = b.single("Backwards", &["[a] p [ok: b]", "[b] q [ok: c]"], &["[a] q;p [ok: c]"]);
        let sweep = ModelSweep { exhaustive_states: 2, random_states: vec![], ..Default::default() };
        let report = check_rule(&rule, &Strategy::Models(sweep)).unwrap();
        assert!(report.violations > 0);
        assert!(report.first_violation.is_some());
    }
}
