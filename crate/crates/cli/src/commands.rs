//! The subcommands. Each returns an [`Outcome`] carrying the exit code and
//! both renderings of its report.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};
use topkat::atoms::{accepts, bounded_difference, TopReading};
use topkat::demos;
use topkat::engine::reduce_pair;
use topkat::failtopkat::SplitPair;
use topkat::logic::{
    check_rule, encode, rules_of_figure, split_triple_text, strategy_for, ModelSweep, Report, Strategy, Style,
};
use topkat::relmodels::{find_countermodel, model_from_json, model_to_json, rel_to_pairs, Claim, Search, TopKind};
use topkat::{
    decide_equal, decide_fail_equal, decide_fail_leq, decide_leq, parse_term, parse_triple, split,
    Alphabet, ErrorCode, Form, RelationalModel, Side, Term, TopSpec, TripleVerdict, Verdict, Witness,
};

use crate::input::{read_text, usage, CliError, Decls};

pub const SCHEMA_VERSION: u32 = 1;

/// What a fail-term verdict means; printed whenever fail terms are decided.
pub const FAIL_SEMANTICS: &str = "terms with fail are split into (ok, er) components and decided componentwise; \
     a verdict is validity in every model of the pair construction over a TopKAT";

pub struct Outcome {
    pub code: u8,
    pub text: String,
    pub json: Value,
    /// Printed to stderr after the report.
    pub diagnostic: Option<String>,
}

fn outcome(command: &str, code: u8, text: String, mut body: Value) -> Outcome {
    let obj = body.as_object_mut().expect("report bodies are objects");
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    obj.insert("command".into(), json!(command));
    obj.insert("exit_code".into(), json!(code));
    Outcome { code, text, json: body, diagnostic: None }
}

fn alphabet_json(a: &Alphabet) -> Value {
    json!({ "actions": a.actions(), "tests": a.tests() })
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
    }
}

fn witness_json(w: &Witness, component: Option<ErrorCode>) -> Value {
    json!({
        "string": w.render(),
        "length": w.string.len(),
        "accepted_by": side_name(w.accepted_by),
        "component": component.map(|c| c.to_string()),
    })
}

fn parse_pair(decls: &Decls, positional: &[String]) -> Result<(Alphabet, Term, Term), CliError> {
    let (header, texts) = decls.inputs(positional, 2)?;
    let alphabet = decls.alphabet(header, |cap| Ok(Alphabet::infer_with_cap(&[&texts[0], &texts[1]], &[], cap)?))?;
    let l = parse_term(&texts[0], &alphabet)?;
    let r = parse_term(&texts[1], &alphabet)?;
    Ok((alphabet, l, r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equal,
    Leq,
}

impl Relation {
    fn command(self) -> &'static str {
        match self {
            Relation::Equal => "equiv",
            Relation::Leq => "leq",
        }
    }

    fn verdict(self, holds: bool) -> &'static str {
        match (self, holds) {
            (Relation::Equal, true) => "Equal",
            (Relation::Equal, false) => "NotEqual",
            (Relation::Leq, true) => "Leq",
            (Relation::Leq, false) => "NotLeq",
        }
    }
}

pub fn compare(decls: &Decls, terms: &[String], rel: Relation) -> Result<Outcome, CliError> {
    let (alphabet, l, r) = parse_pair(decls, terms)?;
    let mut text = String::new();
    writeln!(text, "alphabet: {alphabet}").unwrap();
    writeln!(text, "left: {l}").unwrap();
    writeln!(text, "right: {r}").unwrap();
    let mut body = json!({
        "alphabet": alphabet_json(&alphabet),
        "left": l.to_string(),
        "right": r.to_string(),
    });
    let (holds, witness) = if l.contains_fail() || r.contains_fail() {
        let v = match rel {
            Relation::Equal => decide_fail_equal(&l, &r, &alphabet)?,
            Relation::Leq => decide_fail_leq(&l, &r, &alphabet)?,
        };
        writeln!(text, "semantics: {FAIL_SEMANTICS}").unwrap();
        writeln!(text, "ok component: {}", rel.verdict(v.ok.is_equal())).unwrap();
        writeln!(text, "er component: {}", rel.verdict(v.er.is_equal())).unwrap();
        body["semantics"] = json!(FAIL_SEMANTICS);
        body["components"] = json!({
            "ok": rel.verdict(v.ok.is_equal()),
            "er": rel.verdict(v.er.is_equal()),
        });
        (v.is_equal(), v.witness().map(|(code, w)| (Some(code), w.clone())))
    } else {
        let v = match rel {
            Relation::Equal => decide_equal(&l, &r, &alphabet)?,
            Relation::Leq => decide_leq(&l, &r, &alphabet)?,
        };
        (v.is_equal(), v.witness().map(|w| (None, w.clone())))
    };
    writeln!(text, "verdict: {}", rel.verdict(holds)).unwrap();
    body["verdict"] = json!(rel.verdict(holds));
    body["witness"] = Value::Null;
    if let Some((code, w)) = &witness {
        let tag = code.map(|c| format!("{c}: ")).unwrap_or_default();
        writeln!(text, "witness: {tag}{w}").unwrap();
        body["witness"] = witness_json(w, *code);
    }
    Ok(outcome(rel.command(), if holds { 0 } else { 1 }, text, body))
}

/// Which equational forms to decide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormChoice {
    Default,
    All,
    One(Form),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleStrategy {
    Equational,
    Model,
}

pub fn triple(
    decls: &Decls,
    inputs: &[String],
    forms: FormChoice,
    strategy: TripleStrategy,
    model: Option<&Path>,
) -> Result<Outcome, CliError> {
    match strategy {
        TripleStrategy::Equational => {
            if model.is_some() {
                return Err(usage("--model requires --strategy model"));
            }
            triple_equational(decls, inputs, forms)
        }
        TripleStrategy::Model => {
            let (path, rest) = match (model, inputs) {
                (Some(p), rest) => (p.to_path_buf(), rest),
                (None, [first, rest @ ..]) if !rest.is_empty() => (first.into(), rest),
                _ => return Err(usage("--strategy model needs a model file: `--strategy model <FILE> <TRIPLE>`")),
            };
            triple_in_model(decls, &path, rest, forms)
        }
    }
}

fn selected_forms(choice: FormChoice, style: Style) -> Result<Vec<Form>, CliError> {
    Ok(match choice {
        FormChoice::Default => vec![Form::default_for(style)],
        FormChoice::All => match style {
            Style::Incorrectness => Form::INCORRECTNESS.to_vec(),
            Style::Hoare => Form::HOARE.to_vec(),
        },
        FormChoice::One(f) if f.style() == style => vec![f],
        FormChoice::One(f) => return Err(usage(format!("form {f} does not apply to {style} triples"))),
    })
}

const UNPROVEN_NOTE: &str =
    "the encoding is not valid in every TopKAT; the triple may still hold in particular models";

fn triple_equational(decls: &Decls, inputs: &[String], choice: FormChoice) -> Result<Outcome, CliError> {
    let (header, texts) = decls.inputs(inputs, 1)?;
    let src = &texts[0];
    let alphabet = decls.alphabet(header, |cap| {
        let parts = split_triple_text(src)?;
        Ok(Alphabet::infer_with_cap(&[parts.prog], &[parts.pre, parts.post], cap)?)
    })?;
    let tr = parse_triple(src, &alphabet)?;
    let forms = selected_forms(choice, tr.style)?;
    let mut text = String::new();
    writeln!(text, "triple: {tr}").unwrap();
    writeln!(text, "alphabet: {alphabet}").unwrap();
    writeln!(text, "strategy: equational").unwrap();
    let fail = tr.prog.contains_fail() || tr.code == ErrorCode::Er;
    if fail {
        writeln!(text, "semantics: {FAIL_SEMANTICS}").unwrap();
    }
    let mut results = Vec::new();
    let mut all_valid = true;
    for form in forms {
        let enc = encode(&tr, form)?;
        let verdict = topkat::check_triple_equational(&tr, form, &alphabet)?;
        let name = if verdict.is_valid() { "Valid" } else { "Unproven" };
        writeln!(text, "{form}: {enc}: {name}").unwrap();
        let mut entry = json!({ "form": form.to_string(), "encoding": enc.to_string(), "verdict": name, "witness": null });
        if let TripleVerdict::Unproven(w) = &verdict {
            all_valid = false;
            writeln!(text, "  witness: {w}").unwrap();
            writeln!(text, "  note: {UNPROVEN_NOTE}").unwrap();
            entry["witness"] = witness_json(w, enc.component);
        }
        results.push(entry);
    }
    let body = json!({
        "triple": tr.to_string(),
        "alphabet": alphabet_json(&alphabet),
        "strategy": "equational",
        "semantics": if fail { Value::from(FAIL_SEMANTICS) } else { Value::Null },
        "forms": results,
        "verdict": if all_valid { "Valid" } else { "Unproven" },
    });
    Ok(outcome("triple", if all_valid { 0 } else { 1 }, text, body))
}

fn top_description(m: &RelationalModel) -> String {
    match m.top_spec() {
        TopSpec::Full => "full".into(),
        TopSpec::Explicit(r) => format!("explicit {:?}", r.pairs()),
    }
}

/// Checks the triple against the codomain definition in one model. The
/// triple is parsed over the model's alphabet.
fn triple_in_model(decls: &Decls, path: &Path, inputs: &[String], choice: FormChoice) -> Result<Outcome, CliError> {
    let m = model_from_json(&read_text(path)?)?;
    let (_, texts) = decls.inputs(inputs, 1)?;
    let alphabet = m.alphabet();
    let tr = parse_triple(&texts[0], &alphabet)?;
    let holds = topkat::logic::triple_holds_in(&m, &tr)?;
    let verdict = if holds { "holds" } else { "fails" };
    let mut text = String::new();
    writeln!(text, "triple: {tr}").unwrap();
    writeln!(text, "model: {} ({} states, top {})", path.display(), m.states(), top_description(&m)).unwrap();
    writeln!(text, "strategy: model").unwrap();
    writeln!(text, "semantic: {verdict}").unwrap();
    let forms = match choice {
        FormChoice::Default => selected_forms(FormChoice::All, tr.style)?,
        c => selected_forms(c, tr.style)?,
    };
    let mut encodings = Vec::new();
    for form in forms {
        let enc = encode(&tr, form)?;
        let e = if enc.holds_in(&m)? { "holds" } else { "fails" };
        writeln!(text, "{form}: {enc}: {e}").unwrap();
        encodings.push(json!({ "form": form.to_string(), "encoding": enc.to_string(), "in_model": e }));
    }
    let body = json!({
        "triple": tr.to_string(),
        "model": model_to_json(&m),
        "strategy": "model",
        "verdict": verdict,
        "forms": encodings,
    });
    Ok(outcome("triple", if holds { 0 } else { 1 }, text, body))
}

fn sweep_header(s: &ModelSweep) -> String {
    let sizes: Vec<String> = s.random_states.iter().map(usize::to_string).collect();
    format!(
        "sweep: every model with n <= {}, {} random models for each n in {{{}}}, density {}, seed {}",
        s.exhaustive_states,
        s.random_count,
        sizes.join(","),
        s.density,
        s.seed
    )
}

fn rule_line(report: &Report, strategy: &Strategy) -> (String, Value) {
    let status = if report.passed() { "PASS" } else { "FAIL" };
    match strategy {
        Strategy::Equational(form) => {
            let valid = report.equations.iter().filter(|(_, v)| v.is_valid()).count();
            let line = format!(
                "{:<32} equational {form:<7} {valid}/{} conclusions Valid  {status}",
                report.rule,
                report.equations.len()
            );
            let eqs: Vec<Value> = report
                .equations
                .iter()
                .map(|(enc, v)| json!({ "encoding": enc.to_string(), "verdict": if v.is_valid() { "Valid" } else { "Unproven" } }))
                .collect();
            (line, json!({ "rule": report.rule, "strategy": "equational", "form": form.to_string(), "equations": eqs, "passed": report.passed() }))
        }
        Strategy::Models(_) => {
            let line = format!(
                "{:<32} models             instances {}, premises held {}, violations {}  {status}",
                report.rule, report.instances, report.premises_satisfied, report.violations
            );
            let first = report.first_violation.as_ref().map(|v| {
                json!({ "variant": v.variant, "conclusion": v.conclusion.to_string(), "model": model_to_json(&v.model) })
            });
            (
                line,
                json!({
                    "rule": report.rule,
                    "strategy": "models",
                    "instances": report.instances,
                    "premises_satisfied": report.premises_satisfied,
                    "violations": report.violations,
                    "first_violation": first,
                    "passed": report.passed(),
                }),
            )
        }
    }
}

pub fn rules(figure: Option<u8>, sweep: ModelSweep) -> Result<Outcome, CliError> {
    if !(0.0..=1.0).contains(&sweep.density) {
        return Err(usage(format!("density {} is not a probability", sweep.density)));
    }
    let figures = match figure {
        Some(f) if rules_of_figure(f).is_some() => vec![f],
        Some(f) => return Err(usage(format!("no figure {f}; choose 1, 3 or 5"))),
        None => vec![1, 3, 5],
    };
    let mut text = String::new();
    writeln!(text, "{}", sweep_header(&sweep)).unwrap();
    let mut entries = Vec::new();
    let (mut total, mut passed) = (0, 0);
    for f in &figures {
        for rule in rules_of_figure(*f).unwrap() {
            let strategy = strategy_for(&rule, &sweep);
            let report = check_rule(&rule, &strategy)?;
            let (line, entry) = rule_line(&report, &strategy);
            writeln!(text, "{line}").unwrap();
            if let Some(v) = &report.first_violation {
                writeln!(text, "  first violation ({}): {}", v.variant, v.conclusion).unwrap();
                writeln!(text, "  model: {}", model_to_json(&v.model)).unwrap();
            }
            total += 1;
            passed += usize::from(report.passed());
            entries.push(entry);
        }
    }
    writeln!(text, "{passed} of {total} rules pass").unwrap();
    let body = json!({
        "figures": figures,
        "parameters": {
            "exhaustive_states": sweep.exhaustive_states,
            "random_states": sweep.random_states,
            "random_count": sweep.random_count,
            "density": sweep.density,
            "seed": sweep.seed,
        },
        "rules": entries,
        "passed": passed,
        "total": total,
    });
    Ok(outcome("rules", if passed == total { 0 } else { 1 }, text, body))
}

pub fn examples(pairs: usize, seed: u64) -> Result<Outcome, CliError> {
    let all = demos::all_with(pairs, seed)?;
    let mut text = String::new();
    writeln!(text, "random top-free pairs for kat-separation: {pairs}, seed {seed}").unwrap();
    for d in &all {
        write!(text, "{d}").unwrap();
    }
    let reproduced = all.iter().filter(|d| d.passed()).count();
    writeln!(text, "{reproduced} of {} examples reproduce", all.len()).unwrap();
    let first = all.iter().find_map(|d| d.first_divergence().map(|c| (d.name, c)));
    if let Some((name, c)) = first {
        writeln!(text, "first divergence: {name}: {c}").unwrap();
    }
    let demos: Vec<Value> = all
        .iter()
        .map(|d| {
            let checks: Vec<Value> = d
                .checks
                .iter()
                .map(|c| json!({ "label": c.label, "expected": c.expected, "observed": c.observed, "passed": c.passed() }))
                .collect();
            json!({ "name": d.name, "title": d.title, "passed": d.passed(), "checks": checks })
        })
        .collect();
    let body = json!({
        "parameters": { "random_pairs": pairs, "seed": seed },
        "examples": demos,
        "reproduced": reproduced,
        "total": all.len(),
        "first_divergence": first.map(|(name, c)| json!({ "example": name, "label": c.label })),
    });
    Ok(outcome("examples", if first.is_none() { 0 } else { 1 }, text, body))
}

/// Largest bound the oracle accepts.
pub const MAX_BOUND: usize = 10;

struct OracleComponent {
    component: Option<ErrorCode>,
    text: String,
    json: Value,
    differ: bool,
    disagreement: Option<String>,
}

fn oracle_component(
    l: &Term,
    r: &Term,
    alphabet: &Alphabet,
    bound: usize,
    component: Option<ErrorCode>,
) -> Result<OracleComponent, CliError> {
    let galpha = reduce_pair(l, r, alphabet)?.alphabet;
    let diff = bounded_difference(l, r, &galpha, bound, TopReading::Full)?;
    let engine = decide_equal(l, r, alphabet)?;
    let prefix = component.map(|c| format!("{c} component ")).unwrap_or_default();
    let mut text = String::new();
    let mut disagreement = None;
    match &diff {
        None => writeln!(text, "{prefix}bounded languages: equal up to {bound} actions").unwrap(),
        Some((w, side)) => {
            writeln!(text, "{prefix}bounded languages: differ").unwrap();
            writeln!(
                text,
                "{prefix}first difference: {} (length {}, {} term only)",
                w.display(&galpha),
                w.len(),
                side_name(*side)
            )
            .unwrap();
        }
    }
    match &engine {
        Verdict::Equal => {
            writeln!(text, "{prefix}engine: Equal").unwrap();
            if diff.is_some() {
                disagreement = Some("the engine reports Equal but the bounded languages differ".to_string());
            }
        }
        Verdict::NotEqual(w) => {
            writeln!(text, "{prefix}engine: NotEqual, witness {} (length {})", w.render(), w.string.len()).unwrap();
            let (inside, outside) = match w.accepted_by {
                Side::Left => (l, r),
                Side::Right => (r, l),
            };
            let one_sided = accepts(inside, &galpha, &w.string, TopReading::Full)?
                && !accepts(outside, &galpha, &w.string, TopReading::Full)?;
            if !one_sided {
                disagreement = Some(format!("witness {} is not one-sided", w.render()));
            } else if w.string.len() <= bound {
                match &diff {
                    Some((d, _)) if d.len() == w.string.len() => {}
                    Some((d, _)) => {
                        disagreement = Some(format!(
                            "shortest bounded difference has length {}, engine witness {}",
                            d.len(),
                            w.string.len()
                        ))
                    }
                    None => disagreement = Some("engine witness lies within the bound but no difference found".into()),
                }
            } else if diff.is_some() {
                disagreement = Some("a difference shorter than the engine witness exists".into());
            }
        }
    }
    let check = match &disagreement {
        None => "agree".to_string(),
        Some(msg) => format!("DISAGREE ({msg})"),
    };
    writeln!(text, "{prefix}cross-check: {check}").unwrap();
    let json = json!({
        "component": component.map(|c| c.to_string()),
        "bounded_equal": diff.is_none(),
        "first_difference": diff.as_ref().map(|(w, side)| json!({
            "string": w.display(&galpha).to_string(),
            "length": w.len(),
            "accepted_by": side_name(*side),
        })),
        "engine": if engine.is_equal() { "Equal" } else { "NotEqual" },
        "engine_witness": engine.witness().map(|w| witness_json(w, component)),
        "cross_check": if disagreement.is_none() { "agree" } else { "disagree" },
    });
    Ok(OracleComponent { component, text, json, differ: diff.is_some(), disagreement })
}

pub fn oracle(decls: &Decls, terms: &[String], bound: usize) -> Result<Outcome, CliError> {
    if bound > MAX_BOUND {
        return Err(usage(format!("bound {bound} exceeds the cap of {MAX_BOUND}")));
    }
    let (alphabet, l, r) = parse_pair(decls, terms)?;
    let mut text = String::new();
    writeln!(text, "alphabet: {alphabet}").unwrap();
    writeln!(text, "left: {l}").unwrap();
    writeln!(text, "right: {r}").unwrap();
    writeln!(text, "bound: {bound} actions").unwrap();
    let fail = l.contains_fail() || r.contains_fail();
    let parts = if fail {
        writeln!(text, "semantics: {FAIL_SEMANTICS}").unwrap();
        let (SplitPair { ok: lo, er: le }, SplitPair { ok: ro, er: re }) = (split(&l), split(&r));
        vec![
            oracle_component(&lo, &ro, &alphabet, bound, Some(ErrorCode::Ok))?,
            oracle_component(&le, &re, &alphabet, bound, Some(ErrorCode::Er))?,
        ]
    } else {
        vec![oracle_component(&l, &r, &alphabet, bound, None)?]
    };
    for p in &parts {
        text.push_str(&p.text);
    }
    let differ = parts.iter().any(|p| p.differ);
    let body = json!({
        "alphabet": alphabet_json(&alphabet),
        "left": l.to_string(),
        "right": r.to_string(),
        "bound": bound,
        "components": parts.iter().map(|p| p.json.clone()).collect::<Vec<_>>(),
        "bounded_equal": !differ,
    });
    if let Some(p) = parts.iter().find(|p| p.disagreement.is_some()) {
        let where_ = p.component.map(|c| format!("{c} component: ")).unwrap_or_default();
        let err = CliError::Disagreement(format!("{where_}{}", p.disagreement.as_deref().unwrap()));
        let mut out = outcome("oracle", 2, text, body);
        out.diagnostic = Some(err.to_string());
        return Ok(out);
    }
    Ok(outcome("oracle", if differ { 1 } else { 0 }, text, body))
}

pub struct SearchParams {
    pub leq: bool,
    pub states: usize,
    pub random: bool,
    pub models: usize,
    pub density: f64,
    pub seed: u64,
    pub top: TopKind,
}

pub fn model_search(decls: &Decls, terms: &[String], p: &SearchParams) -> Result<Outcome, CliError> {
    let (alphabet, l, r) = parse_pair(decls, terms)?;
    if l.contains_fail() || r.contains_fail() {
        return Err(usage("model search takes fail-free terms"));
    }
    if p.random && !(0.0..=1.0).contains(&p.density) {
        return Err(usage(format!("density {} is not a probability", p.density)));
    }
    let claim = if p.leq { Claim::leq(l.clone(), r.clone()) } else { Claim::eq(l.clone(), r.clone()) };
    let top = match p.top {
        TopKind::Full => "full",
        TopKind::Closure => "closure",
    };
    let (search, header, params) = if p.random {
        (
            Search::Random { states: p.states, count: p.models, density: p.density, top: p.top, seed: p.seed },
            format!(
                "search: {} random models with n = {}, density {}, top {top}, seed {}",
                p.models, p.states, p.density, p.seed
            ),
            json!({ "mode": "random", "states": p.states, "count": p.models, "density": p.density, "top": top, "seed": p.seed }),
        )
    } else {
        (
            Search::Exhaustive { max_states: p.states, top: p.top },
            format!("search: every model with n <= {}, top {top}", p.states),
            json!({ "mode": "exhaustive", "max_states": p.states, "top": top }),
        )
    };
    let rel = if p.leq { "<=" } else { "=" };
    let mut text = String::new();
    writeln!(text, "{header}").unwrap();
    writeln!(text, "alphabet: {alphabet}").unwrap();
    writeln!(text, "claim: {l} {rel} {r}").unwrap();
    let found = find_countermodel(&claim, &alphabet, &search)?;
    let mut body = json!({
        "alphabet": alphabet_json(&alphabet),
        "claim": { "left": l.to_string(), "relation": rel, "right": r.to_string() },
        "parameters": params,
        "countermodel": null,
    });
    match &found {
        None => writeln!(text, "no countermodel").unwrap(),
        Some(c) => {
            writeln!(text, "countermodel with {} states:", c.model.states()).unwrap();
            writeln!(text, "{}", model_to_json(&c.model)).unwrap();
            writeln!(text, "left: {}", rel_to_pairs(&c.lhs)).unwrap();
            writeln!(text, "right: {}", rel_to_pairs(&c.rhs)).unwrap();
            body["countermodel"] = json!({
                "model": model_to_json(&c.model),
                "left": rel_to_pairs(&c.lhs),
                "right": rel_to_pairs(&c.rhs),
            });
        }
    }
    Ok(outcome("model-search", if found.is_some() { 1 } else { 0 }, text, body))
}
