//! `phasespace`: decide first-order properties of one-dimensional cellular automata.

mod sweep;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phasespace::automata::BuchiAutomaton;
use phasespace::ca::CaRule;
use phasespace::checker::{CheckError, Checker, Options, Verdict};
use phasespace::finite_support::{bounded_confluence, bounded_reachability, Confluence, FiniteConfiguration, Reachability};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "phasespace", version, about = "Model checking for the phase space of one-dimensional cellular automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a sentence. Exit 0 if true, 1 if false, 2 on error.
    Check(CheckArgs),
    /// Preset report: surjectivity, injectivity, fixed points, k-cycles.
    Props(PropsArgs),
    /// One property over a range of elementary rules.
    Sweep(sweep::SweepArgs),
    /// Bounded reachability between finite-support configurations.
    Reach(ReachArgs),
    /// Bounded confluence of two finite-support configurations.
    Confluence(ConfluenceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Cap on the size of any constructed automaton.
    #[arg(long, default_value_t = phasespace::checker::DEFAULT_STATE_BUDGET, value_parser = crate::positive)]
    state_budget: usize,
    /// k-cycles have least period exactly k; `false` counts any period dividing k.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    exact_cycles: bool,
    /// Also write the JSON result to this file.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl Common {
    fn options(&self) -> Options {
        Options {
            state_budget: self.state_budget,
            exact_cycles: self.exact_cycles,
        }
    }
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// `eca:<code>` or a rule table file.
    #[arg(long)]
    rule: String,
    #[arg(long, conflicts_with = "formula_file", required_unless_present = "formula_file")]
    formula: Option<String>,
    #[arg(long, value_name = "FILE")]
    formula_file: Option<PathBuf>,
    /// Predicate `name=file`; the file holds an automaton over one pair track or
    /// a configuration literal.
    #[arg(long = "pred", value_name = "NAME=FILE")]
    preds: Vec<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct PropsArgs {
    /// `eca:<code>` or a rule table file.
    rule: String,
    /// Largest cycle length reported.
    #[arg(long, default_value_t = 3)]
    max_k: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ReachArgs {
    #[arg(long)]
    rule: String,
    /// Start configuration `<word>@<offset>`.
    from: String,
    /// Target configuration `<word>@<offset>`.
    to: String,
    #[arg(long, default_value_t = 100)]
    max_steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct ConfluenceArgs {
    #[arg(long)]
    rule: String,
    x: String,
    y: String,
    #[arg(long, default_value_t = 100)]
    max_steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// A failure reported as diagnostic JSON with exit code 2.
#[derive(Debug)]
pub struct Failure {
    kind: &'static str,
    message: String,
    detail: Value,
    /// Output was already printed; only the exit code remains.
    reported: bool,
}

impl Failure {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            kind,
            message: message.into(),
            detail: Value::Null,
            reported: false,
        }
    }

    pub fn reported(mut self) -> Self {
        self.reported = true;
        self
    }

    fn to_json(&self) -> Value {
        let mut v = json!({ "error": { "kind": self.kind, "message": self.message } });
        if !self.detail.is_null() {
            v["error"]["detail"] = self.detail.clone();
        }
        v
    }
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Self {
        let (kind, detail) = match &e {
            CheckError::Parse(p) => ("parse", json!({ "line": p.line, "column": p.column, "offset": p.offset })),
            CheckError::Invalid(_) | CheckError::NotASentence(_) => ("validate", Value::Null),
            CheckError::Resource(_) => ("resource", Value::Null),
            CheckError::Unsat => ("unsat", Value::Null),
            _ => ("check", Value::Null),
        };
        Failure {
            kind,
            message: e.to_string(),
            detail,
            reported: false,
        }
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("expected a positive integer, got `{s}`")),
    }
}

pub fn load_rule(spec: &str) -> Result<CaRule, Failure> {
    let text = if spec.trim().starts_with("eca:") || !Path::new(spec).exists() {
        spec.to_string()
    } else {
        read(Path::new(spec))?
    };
    CaRule::parse_spec(&text).map_err(|e| Failure::new("rule", e.to_string()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))
}

fn register(checker: &mut Checker, spec: &str) -> Result<(), Failure> {
    let (name, file) = spec
        .split_once('=')
        .ok_or_else(|| Failure::new("usage", format!("--pred expects NAME=FILE, got `{spec}`")))?;
    let text = read(Path::new(file))?;
    let looks_like_automaton = text.lines().any(|l| l.trim_start().starts_with("alphabet"));
    let result = match BuchiAutomaton::from_text(&text) {
        Ok(a) => checker.register_predicate(name, a),
        Err(e) if looks_like_automaton => {
            return Err(Failure::new("predicate", format!("{name}: {e}")));
        }
        Err(_) => checker
            .parse_configuration(text.trim())
            .and_then(|c| checker.register_configuration(name, &c)),
    };
    result.map_err(|e| Failure::new("predicate", format!("{name}: {e}")))
}

/// Prints `value` (and writes it to `--json`), in the requested format.
pub fn emit(value: &impl Serialize, json_out: Option<&Path>, format: Format, text: impl FnOnce() -> String) -> Result<(), Failure> {
    let rendered = serde_json::to_string_pretty(value).expect("serializable output");
    if let Some(path) = json_out {
        fs::write(path, format!("{rendered}\n"))
            .map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    }
    let out = match format {
        Format::Json => format!("{rendered}\n"),
        Format::Text => text(),
    };
    write_stdout(&out);
    Ok(())
}

/// Writes to stdout, ignoring a closed pipe.
fn write_stdout(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn verdict_text(v: &Verdict) -> String {
    let mut out = format!("{}\nresult: {}\n", v.formula, v.result);
    if let Some(c) = v.cardinality {
        out += &format!("cardinality: {c}\n");
    }
    for (var, lit) in v.witness.iter().flatten() {
        out += &format!("witness {var} = {lit}\n");
    }
    for e in &v.stats.evaluated {
        let classes: Vec<String> = e.cardinality.iter().map(|c| c.to_string()).collect();
        out += &format!("evaluated {} [{}] = {}\n", e.formula, classes.join(", "), e.value);
    }
    out += &format!("max states: {}\ntime: {:.3}s\n", v.stats.max_states, v.elapsed.as_secs_f64());
    out
}

fn check(args: &CheckArgs) -> Result<bool, Failure> {
    let rule = load_rule(&args.rule)?;
    let mut checker = Checker::with_options(rule, args.common.options());
    for p in &args.preds {
        register(&mut checker, p)?;
    }
    let text = match (&args.formula, &args.formula_file) {
        (Some(f), _) => f.clone(),
        (None, Some(path)) => read(path)?,
        (None, None) => unreachable!("clap requires one formula source"),
    };
    let verdict = checker.check(&text)?;
    emit(&verdict, args.common.json.as_deref(), args.common.format, || verdict_text(&verdict))?;
    Ok(verdict.result)
}

fn props(args: &PropsArgs) -> Result<bool, Failure> {
    let rule = load_rule(&args.rule)?;
    let checker = Checker::with_options(rule, args.common.options());
    let report = checker.report(args.max_k)?;
    emit(&report, args.common.json.as_deref(), args.common.format, || {
        let mut out = format!(
            "rule: {}\nsurjective: {}\ninjective: {}\nfixed points: {}\n",
            report.rule, report.surjective, report.injective, report.fixed_points
        );
        for w in &report.fixed_point_witnesses {
            out += &format!("  {w}\n");
        }
        for c in &report.cycles {
            let kind = if c.exact { "exact" } else { "dividing" };
            out += &format!("{}-cycles ({kind}): {}\n", c.k, c.cardinality);
        }
        out
    })?;
    Ok(true)
}

fn finite(rule: &CaRule, literal: &str) -> Result<FiniteConfiguration, Failure> {
    FiniteConfiguration::parse(literal, rule).map_err(|e| Failure::new("configuration", e.to_string()))
}

fn reach(args: &ReachArgs) -> Result<bool, Failure> {
    let rule = load_rule(&args.rule)?;
    let from = finite(&rule, &args.from)?;
    let to = finite(&rule, &args.to)?;
    let r = bounded_reachability(&rule, &from, &to, args.max_steps)
        .map_err(|e| Failure::new("finite", e.to_string()))?;
    let (reached, value) = match r {
        Reachability::Reached(n) => (true, json!({ "result": true, "steps": n })),
        Reachability::NotWithin(n) => (false, json!({ "result": false, "max_steps": n })),
    };
    emit(&value, None, args.format, || format!("{r:?}\n"))?;
    Ok(reached)
}

fn confluence(args: &ConfluenceArgs) -> Result<bool, Failure> {
    let rule = load_rule(&args.rule)?;
    let x = finite(&rule, &args.x)?;
    let y = finite(&rule, &args.y)?;
    let r = bounded_confluence(&rule, &x, &y, args.max_steps)
        .map_err(|e| Failure::new("finite", e.to_string()))?;
    let value = match &r {
        Confluence::Confluent(z, i, j) => json!({
            "result": true,
            "meet": z.to_literal(rule.states()),
            "steps": [i, j],
        }),
        Confluence::NotWithin(n) => json!({ "result": false, "max_steps": n }),
    };
    emit(&value, None, args.format, || match &r {
        Confluence::Confluent(z, i, j) => format!("Confluent({}, {i}, {j})\n", z.to_literal(rule.states())),
        Confluence::NotWithin(n) => format!("NotWithin({n})\n"),
    })?;
    Ok(matches!(r, Confluence::Confluent(..)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check(a) => check(a),
        Command::Props(a) => props(a),
        Command::Sweep(a) => sweep::run(a),
        Command::Reach(a) => reach(a),
        Command::Confluence(a) => confluence(a),
    };
    match outcome {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            if f.reported {
                eprintln!("error: {}", f.message);
            } else {
                write_stdout(&format!("{}\n", serde_json::to_string_pretty(&f.to_json()).expect("json")));
            }
            ExitCode::from(2)
        }
    }
}
