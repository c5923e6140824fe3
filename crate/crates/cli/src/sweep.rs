use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use phasespace::ca::CaRule;
use phasespace::checker::{Checker, Options};
use phasespace::debruijn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::{emit, Failure, Format};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Property {
    Surjective,
    Injective,
    FixedPoints,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Inclusive range of elementary rule codes, `a..b`.
    range: String,
    property: Property,
    /// Compare with the de Bruijn graph oracle (surjective and injective only).
    #[arg(long)]
    oracle: bool,
    /// Check a random sample of this many rules from the range.
    #[arg(long)]
    sample: Option<usize>,
    /// Seed for `--sample`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = phasespace::checker::DEFAULT_STATE_BUDGET, value_parser = crate::positive)]
    state_budget: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    format: TableFormat,
    /// Also write the JSON table to this file.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Row {
    rule: u32,
    value: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct Summary {
    rules: usize,
    errors: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    disagreements: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    holds: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Table {
    property: Property,
    rows: Vec<Row>,
    summary: Summary,
}

fn parse_range(text: &str) -> Result<Vec<u32>, Failure> {
    let bad = || Failure::new("usage", format!("expected a range `a..b` of rule codes, got `{text}`"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a > b || b > 255 {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

fn evaluate(code: u32, property: Property, oracle: bool, options: Options) -> Row {
    let rule = CaRule::elementary(code).expect("code in range");
    let checker = Checker::with_options(rule.clone(), options);
    let value = match property {
        Property::Surjective => checker.is_surjective().map(Value::Bool),
        Property::Injective => checker.is_injective().map(Value::Bool),
        Property::FixedPoints => checker
            .fixed_points()
            .map(|r| Value::String(r.cardinality.to_string())),
    };
    let expected = oracle.then(|| match property {
        Property::Surjective => debruijn::is_surjective(&rule),
        Property::Injective => debruijn::is_injective(&rule),
        Property::FixedPoints => unreachable!("rejected before the sweep"),
    });
    match value {
        Ok(value) => Row {
            rule: code,
            agree: expected.map(|e| value == Value::Bool(e)),
            value,
            oracle: expected,
            error: None,
        },
        Err(e) => Row {
            rule: code,
            value: Value::Null,
            oracle: expected,
            agree: None,
            error: Some(e.to_string()),
        },
    }
}

fn csv(table: &Table, oracle: bool) -> String {
    let mut out = String::from(if oracle { "rule,value,oracle,agree\n" } else { "rule,value\n" });
    for r in &table.rows {
        let value = match &r.value {
            Value::String(s) => s.clone(),
            Value::Null => format!("error: {}", r.error.as_deref().unwrap_or("")),
            v => v.to_string(),
        };
        write!(out, "{},{value}", r.rule).unwrap();
        if oracle {
            let show = |b: Option<bool>| b.map_or(String::new(), |b| b.to_string());
            write!(out, ",{},{}", show(r.oracle), show(r.agree)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn run(args: &SweepArgs) -> Result<bool, Failure> {
    if args.oracle && args.property == Property::FixedPoints {
        return Err(Failure::new("usage", "no oracle is available for fixed_points"));
    }
    let mut codes = parse_range(&args.range)?;
    if let Some(n) = args.sample {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        codes.shuffle(&mut rng);
        codes.truncate(n);
        codes.sort_unstable();
    }
    let options = Options {
        state_budget: args.state_budget,
        ..Options::default()
    };
    // par_iter keeps the input order on collect
    let rows: Vec<Row> = codes
        .par_iter()
        .map(|&c| evaluate(c, args.property, args.oracle, options))
        .collect();
    let errors = rows.iter().filter(|r| r.error.is_some()).count();
    let disagreements = args
        .oracle
        .then(|| rows.iter().filter(|r| r.agree == Some(false)).count());
    let holds = (args.property != Property::FixedPoints)
        .then(|| rows.iter().filter(|r| r.value == Value::Bool(true)).count());
    let table = Table {
        property: args.property,
        summary: Summary {
            rules: rows.len(),
            errors,
            disagreements,
            holds,
        },
        rows,
    };
    let format = match args.format {
        TableFormat::Json => Format::Json,
        _ => Format::Text,
    };
    emit(&table, args.json.as_deref(), format, || {
        let mut out = csv(&table, args.oracle);
        if args.format == TableFormat::Text {
            let s = &table.summary;
            write!(out, "# {} rules, {} errors", s.rules, s.errors).unwrap();
            if let Some(d) = s.disagreements {
                write!(out, ", {d} disagreements").unwrap();
            }
            out.push('\n');
        }
        out
    })?;
    if errors > 0 {
        return Err(Failure::new("sweep", format!("{errors} rules failed")).reported());
    }
    Ok(disagreements.unwrap_or(0) == 0)
}
