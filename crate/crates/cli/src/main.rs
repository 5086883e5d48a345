//! `topkat`: decide TopKAT equations, check triples, and run the rule and
//! example suites from the command line.
//!
//! Exit codes: 0 when the claim holds (Equal, Valid, no countermodel, all
//! rules pass), 1 when it does not, 2 on usage, parse or internal errors.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use topkat::logic::ModelSweep;
use topkat::relmodels::TopKind;
use topkat::Form;

use commands::{FormChoice, Outcome, Relation, SearchParams, TripleStrategy};
use input::{CliError, Decls};

#[derive(Parser)]
#[command(name = "topkat", version, about = "Decide TopKAT equations and check Hoare and incorrectness triples")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Primitive actions, comma or space separated.
    #[arg(long, global = true, value_name = "LIST")]
    actions: Option<String>,
    /// Primitive tests, comma or space separated.
    #[arg(long, global = true, value_name = "LIST")]
    tests: Option<String>,
    /// Read an `actions:`/`tests:` header and the inputs (one per line)
    /// from a file.
    #[arg(long, global = true, value_name = "PATH")]
    file: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for model sweeps.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two terms are equal in every TopKAT.
    Equiv(PairArgs),
    /// Decide whether the first term is below the second in every TopKAT.
    Leq(PairArgs),
    /// Check a triple `[pre] prog [ok: post]`, `[pre] prog [er: post]` or
    /// `{pre} prog {post}`.
    Triple(TripleArgs),
    /// Check the soundness of the rules of figure 1, 3 or 5.
    Rules(RulesArgs),
    /// Run the pinned worked examples.
    Examples(ExamplesArgs),
    /// Compare bounded guarded-string languages and cross-check the engine.
    Oracle(OracleArgs),
    /// Search finite relational models for a counterexample to an equation.
    ModelSearch(SearchArgs),
}

#[derive(Args)]
struct PairArgs {
    /// Two terms; read from --file when omitted.
    #[arg(num_args = 0..=2)]
    terms: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    F1,
    F2,
    F3,
    Kozen,
    #[value(name = "topleq")]
    TopLeq,
    #[value(name = "toptop")]
    TopTop,
    /// Every form of the triple's style.
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Equational,
    Model,
}

#[derive(Args)]
struct TripleArgs {
    /// Equational form; defaults to F2 for incorrectness and kozen for
    /// Hoare triples.
    #[arg(long, value_enum)]
    form: Option<FormArg>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Equational)]
    strategy: StrategyArg,
    /// Model file for the model strategy; may also be given as the first
    /// positional argument.
    #[arg(long, value_name = "PATH")]
    model: Option<PathBuf>,
    /// `[MODEL] TRIPLE`; the triple is read from --file when omitted.
    #[arg(num_args = 0..=2)]
    inputs: Vec<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Random models per size.
    #[arg(long, default_value_t = 1000)]
    models: usize,
    /// Every model up to this many states is checked.
    #[arg(long, default_value_t = 2)]
    exhaustive_states: usize,
    /// Sizes of the random models.
    #[arg(long, value_delimiter = ',', default_value = "3,4")]
    random_states: Vec<usize>,
    /// Probability of each pair in a random action.
    #[arg(long, default_value_t = 0.4)]
    density: f64,
}

#[derive(Args)]
struct RulesArgs {
    /// 1, 3 or 5; every figure when omitted.
    #[arg(long)]
    figure: Option<u8>,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Args)]
struct ExamplesArgs {
    /// Seed of the random top-free pairs in the separation example.
    #[arg(long, default_value_t = topkat::demos::SEPARATION_SEED)]
    seed: u64,
    #[arg(long, default_value_t = topkat::demos::SEPARATION_PAIRS)]
    pairs: usize,
}

#[derive(Args)]
struct OracleArgs {
    /// Maximum number of actions in compared strings (at most 10).
    #[arg(long, default_value_t = 4)]
    bound: usize,
    #[arg(num_args = 0..=2)]
    terms: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TopArg {
    Full,
    Closure,
}

#[derive(Args)]
struct SearchArgs {
    /// Check `left <= right` instead of equality.
    #[arg(long)]
    leq: bool,
    /// Largest model for the exhaustive search; model size for --random.
    #[arg(long, default_value_t = 2)]
    states: usize,
    /// Sample models instead of enumerating them.
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 1000)]
    models: usize,
    #[arg(long, default_value_t = 0.4)]
    density: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = TopArg::Full)]
    top: TopArg,
    #[arg(num_args = 0..=2)]
    terms: Vec<String>,
}

fn form_choice(f: Option<FormArg>) -> FormChoice {
    match f {
        None => FormChoice::Default,
        Some(FormArg::All) => FormChoice::All,
        Some(FormArg::F1) => FormChoice::One(Form::F1),
        Some(FormArg::F2) => FormChoice::One(Form::F2),
        Some(FormArg::F3) => FormChoice::One(Form::F3),
        Some(FormArg::Kozen) => FormChoice::One(Form::Kozen),
        Some(FormArg::TopLeq) => FormChoice::One(Form::TopLeq),
        Some(FormArg::TopTop) => FormChoice::One(Form::TopTop),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Equiv(_) => "equiv",
        Command::Leq(_) => "leq",
        Command::Triple(_) => "triple",
        Command::Rules(_) => "rules",
        Command::Examples(_) => "examples",
        Command::Oracle(_) => "oracle",
        Command::ModelSearch(_) => "model-search",
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(n) = cli.global.jobs {
        if n == 0 {
            return Err(input::usage("--jobs must be at least 1"));
        }
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let decls = Decls { actions: cli.global.actions.clone(), tests: cli.global.tests.clone(), file: cli.global.file.clone() };
    match &cli.command {
        Command::Equiv(a) => commands::compare(&decls, &a.terms, Relation::Equal),
        Command::Leq(a) => commands::compare(&decls, &a.terms, Relation::Leq),
        Command::Triple(a) => {
            let strategy = match a.strategy {
                StrategyArg::Equational => TripleStrategy::Equational,
                StrategyArg::Model => TripleStrategy::Model,
            };
            commands::triple(&decls, &a.inputs, form_choice(a.form), strategy, a.model.as_deref())
        }
        Command::Rules(a) => {
            let s = &a.sweep;
            let sweep = ModelSweep {
                exhaustive_states: s.exhaustive_states,
                random_states: s.random_states.clone(),
                random_count: s.models,
                density: s.density,
                seed: s.seed,
            };
            commands::rules(a.figure, sweep)
        }
        Command::Examples(a) => commands::examples(a.pairs, a.seed),
        Command::Oracle(a) => commands::oracle(&decls, &a.terms, a.bound),
        Command::ModelSearch(a) => {
            let params = SearchParams {
                leq: a.leq,
                states: a.states,
                random: a.random,
                models: a.models,
                density: a.density,
                seed: a.seed,
                top: match a.top {
                    TopArg::Full => TopKind::Full,
                    TopArg::Closure => TopKind::Closure,
                },
            };
            commands::model_search(&decls, &a.terms, &params)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let json = cli.global.format == Format::Json;
    match run(&cli) {
        Ok(out) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("reports serialize"));
            } else {
                print!("{}", out.text);
            }
            if let Some(d) = &out.diagnostic {
                eprintln!("error: {d}");
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            if json {
                let body = serde_json::json!({
                    "schema_version": commands::SCHEMA_VERSION,
                    "command": command_name(&cli.command),
                    "exit_code": 2,
                    "error": e.to_string(),
                });
                println!("{}", serde_json::to_string_pretty(&body).expect("reports serialize"));
            }
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
