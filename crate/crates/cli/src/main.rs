//! `fvl`: learn formulas and terms from labeled finite structures.
//!
//! Exit codes: 0 when a verdict is reached, 1 on internal failure or oracle
//! disagreement, 2 on invalid input, 3 when the search budget runs out.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fvl::automata::Budget;
use fvl::io::{digest, load_structures, structures_to_json, LoadedStructure, ResultFile};
use fvl::model::eval3::{eval_fun3, Env3, Value3};
use fvl::model::{Assignment, LogicKind, Tree};
use fvl::oracle::{corrupted_tool, reports_to_lines, run_suite, GenConfig, Tool};
use fvl::rtg::{parse_grammar, print_grammar, Rtg};
use fvl::syntax::{parse_prefix, parse_sexpr, to_prefix};
use fvl::synthesis::{synthesize, Problem, ProblemInstance, SynthError, Verdict};

#[derive(Parser)]
#[command(name = "fvl", version, about = "Grammar-constrained learning of finite-variable formulas and terms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a smallest sentence true on the positive and false on the negative structures.
    Sep(SepArgs),
    /// Find a smallest formula whose answer set is each structure's label.
    Query(QueryArgs),
    /// Find a smallest closed term that evaluates to the output constant everywhere.
    Term(TermArgs),
    /// Evaluate a formula or term on one structure.
    Eval(EvalArgs),
    /// Cross-check the engine against brute force on random instances.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct Common {
    /// Grammar file in the rtg format.
    #[arg(long)]
    grammar: PathBuf,
    /// Structure files; each holds one structure or an array of them.
    #[arg(long, num_args = 1.., required = true)]
    structures: Vec<PathBuf>,
    /// Upper bound on the number of search classes.
    #[arg(long)]
    max_states: Option<usize>,
    /// Where to write the result file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep wall-clock time in the result file.
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LogicArg {
    Fo,
    Folfp,
}

#[derive(Args)]
struct SepArgs {
    #[command(flatten)]
    common: Common,
    /// Required logic; must match the grammar's header.
    #[arg(long, value_enum)]
    logic: Option<LogicArg>,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    common: Common,
    /// Answer variables, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "arity")]
    vars: Option<Vec<String>>,
    /// Use the first N variables of the logic as answer variables.
    #[arg(long)]
    arity: Option<usize>,
}

#[derive(Args)]
struct TermArgs {
    #[command(flatten)]
    common: Common,
    /// Output constant; defaults to the structures' io block, then `out`.
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    /// Formula or term in prefix or s-expression form.
    #[arg(long)]
    formula: PathBuf,
    /// A file holding exactly one structure.
    #[arg(long)]
    structure: PathBuf,
    /// Variable bindings such as `x=Sue,y=2`.
    #[arg(long, value_delimiter = ',')]
    assignment: Vec<String>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    count: usize,
    /// Size bound for brute-force enumeration.
    #[arg(long, default_value_t = 9)]
    max_size: usize,
    /// Check a deliberately wrong tool instead; the run must then fail.
    #[arg(long)]
    corrupt_tool: bool,
    /// Where to write the line-delimited reports; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep wall-clock time in the reports.
    #[arg(long)]
    timings: bool,
}

/// An error paired with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn invalid(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 2, error: error.into() }
    }

    fn internal(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 1, error: error.into() }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sep(a) => cmd_sep(a),
        Command::Query(a) => cmd_query(a),
        Command::Term(a) => cmd_term(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(Failure::invalid)
}

fn load_grammar(path: &Path) -> Result<Rtg, Failure> {
    parse_grammar(&read(path)?).map_err(|e| Failure::invalid(anyhow!("{}: {e}", path.display())))
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<LoadedStructure>, Failure> {
    let mut out = Vec::new();
    for p in paths {
        let items = load_structures(&read(p)?).map_err(|e| Failure::invalid(anyhow!("{}: {e}", p.display())))?;
        out.extend(items);
    }
    Ok(out)
}

fn run(problem: Problem, name: &str, grammar: Rtg, loaded: &[LoadedStructure], common: &Common) -> Outcome {
    let mut budget = Budget::default();
    if let Some(n) = common.max_states {
        budget.max_classes = n;
    }
    let problem_text = match &problem {
        Problem::Separability => name.to_string(),
        Problem::Query { vars } => format!("{name}({})", vars.join(",")),
        Problem::Term { output } => format!("{name}({output})"),
    };
    let instance_digest = digest([problem_text.as_str(), &print_grammar(&grammar), &structures_to_json(loaded)]);
    let inst =
        ProblemInstance { problem, grammar, structures: loaded.iter().map(|l| l.structure.clone()).collect(), budget };
    let r = synthesize(&inst).map_err(|e| match e {
        SynthError::Unverified(_) => Failure::internal(e),
        _ => Failure::invalid(e),
    })?;
    let file = ResultFile::new(name, &r, instance_digest, common.timings);
    let json = serde_json::to_string_pretty(&file).map_err(Failure::internal)? + "\n";
    match &common.out {
        Some(p) => {
            std::fs::write(p, json)
                .with_context(|| format!("cannot write {}", p.display()))
                .map_err(Failure::internal)?;
            println!("{}", summary(&r.verdict, r.witness.as_ref()));
        }
        None => print!("{json}"),
    }
    Ok(match r.verdict {
        Verdict::BudgetExceeded => 3,
        _ => 0,
    })
}

fn summary(v: &Verdict, w: Option<&Tree>) -> String {
    match (v, w) {
        (Verdict::Realizable, Some(t)) => format!("realizable (size {}): {}", t.size(), to_prefix(t)),
        (Verdict::Realizable, None) => "realizable".into(),
        (Verdict::Unrealizable, _) => "unrealizable".into(),
        (Verdict::BudgetExceeded, _) => "budget exceeded".into(),
    }
}

fn cmd_sep(a: SepArgs) -> Outcome {
    let grammar = load_grammar(&a.common.grammar)?;
    if let Some(l) = a.logic {
        let want = match l {
            LogicArg::Fo => LogicKind::Fo,
            LogicArg::Folfp => LogicKind::FoLfp,
        };
        if grammar.logic.kind != want {
            return Err(Failure::invalid(anyhow!(
                "{}: grammar declares logic {}, not {}",
                a.common.grammar.display(),
                grammar.logic.kind.name(),
                want.name()
            )));
        }
    }
    let loaded = load_all(&a.common.structures)?;
    run(Problem::Separability, "separability", grammar, &loaded, &a.common)
}

fn cmd_query(a: QueryArgs) -> Outcome {
    let grammar = load_grammar(&a.common.grammar)?;
    let loaded = load_all(&a.common.structures)?;
    let vars = match (a.vars, a.arity) {
        (Some(v), _) => v,
        (None, Some(n)) => first_vars(&grammar, n)?,
        (None, None) => {
            let arity = loaded.iter().find_map(|l| match &l.structure.label {
                fvl::model::Label::Answers(ans) => ans.iter().next().map(Vec::len),
                _ => None,
            });
            let n = arity.ok_or_else(|| Failure::invalid(anyhow!("give --vars or --arity")))?;
            first_vars(&grammar, n)?
        }
    };
    run(Problem::Query { vars }, "query", grammar, &loaded, &a.common)
}

fn first_vars(g: &Rtg, n: usize) -> Result<Vec<String>, Failure> {
    if n > g.logic.vars.len() {
        return Err(Failure::invalid(anyhow!("arity {n} exceeds the logic's {} variables", g.logic.vars.len())));
    }
    Ok(g.logic.vars[..n].to_vec())
}

fn cmd_term(a: TermArgs) -> Outcome {
    let grammar = load_grammar(&a.common.grammar)?;
    let loaded = load_all(&a.common.structures)?;
    let declared: BTreeSet<&str> = loaded.iter().filter_map(|l| l.io.as_ref()).map(|io| io.output.as_str()).collect();
    let output = match (a.output, declared.len()) {
        (Some(o), _) => o,
        (None, 0) => "out".to_string(),
        (None, 1) => declared.into_iter().next().unwrap().to_string(),
        (None, _) => return Err(Failure::invalid(anyhow!("structures name different output constants"))),
    };
    run(Problem::Term { output }, "term", grammar, &loaded, &a.common)
}

fn cmd_eval(a: EvalArgs) -> Outcome {
    let text = read(&a.structure)?;
    let mut loaded = load_structures(&text).map_err(|e| Failure::invalid(anyhow!("{}: {e}", a.structure.display())))?;
    if loaded.len() != 1 {
        return Err(Failure::invalid(anyhow!("{}: expected exactly one structure", a.structure.display())));
    }
    let s = loaded.pop().unwrap().structure;
    let constants: BTreeSet<String> = s.signature().constants().map(String::from).collect();
    let src = read(&a.formula)?;
    let parsed = if src.trim_start().starts_with('(') {
        parse_sexpr(&src, &constants).map_err(|e| anyhow!("{e}"))
    } else {
        parse_prefix(&src, &constants).map_err(|e| anyhow!("{e}"))
    };
    let t = parsed.map_err(|e| Failure::invalid(anyhow!("{}: {e}", a.formula.display())))?;
    let mut pairs = Vec::new();
    for item in a.assignment.iter().filter(|s| !s.is_empty()) {
        let (var, value) = item
            .split_once('=')
            .ok_or_else(|| Failure::invalid(anyhow!("bad binding `{item}`, expected var=element")))?;
        let e = s
            .elem(value)
            .or_else(|| value.parse().ok().filter(|&i: &u32| (i as usize) < s.size()))
            .ok_or_else(|| Failure::invalid(anyhow!("unknown element `{value}`")))?;
        pairs.push((var.trim().to_string(), e));
    }
    let gamma = Assignment::from_pairs(pairs.iter().map(|(v, e)| (v.as_str(), *e)));
    if let Some(v) = t.free_vars().into_iter().find(|v| gamma.get(v).is_none()) {
        return Err(Failure::invalid(anyhow!("free variable `{v}` has no value; pass --assignment {v}=...")));
    }
    match eval_fun3(&s, &gamma, &Env3::empty(), &t) {
        Value3::Truth(v) => println!("{}", v.name()),
        Value3::Elem(Some(e)) => println!("{}", s.name_of(e)),
        Value3::Elem(None) => println!("undef"),
    }
    Ok(0)
}

fn cmd_oracle(a: OracleArgs) -> Outcome {
    let tool: Tool = if a.corrupt_tool { &corrupted_tool } else { &synthesize };
    let config = GenConfig { max_size: a.max_size, ..GenConfig::default() };
    let mut reports = run_suite(a.seed, a.count, a.max_size, &config, tool);
    if !a.timings {
        reports.iter_mut().for_each(|r| r.millis = 0);
    }
    let lines = reports_to_lines(&reports);
    match &a.out {
        Some(p) => std::fs::write(p, lines)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(Failure::internal)?,
        None => print!("{lines}"),
    }
    let bad = reports.iter().filter(|r| !r.agree).count();
    eprintln!("{} instances, {} agree, {bad} disagree", reports.len(), reports.len() - bad);
    Ok(if bad == 0 { 0 } else { 1 })
}
