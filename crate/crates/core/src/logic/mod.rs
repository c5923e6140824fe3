//! First-order formulas over `{→, =, In[P]}` with infinity, cardinality,
//! modulo and Härtig quantifiers.
//!
//! Grammar (lowest precedence first; quantifier bodies extend as far right as
//! possible):
//!
//! ```text
//! formula  := iff
//! iff      := implies ("<=>" implies)*
//! implies  := or ("=>" implies)?
//! or       := and ("|" and)*
//! and      := unary ("&" unary)*
//! unary    := "~" unary | quant | "H" binder "." "(" formula ";" formula ")" | atom
//! quant    := ("E" | "A" | "Einf" | "Ecard[" card "]" | "Emod[" t "," k "]") binder "." formula
//! card     := n | "aleph0" | "continuum"
//! binder   := ident | "(" ident ("," ident)* ")"
//! atom     := ident "->" ident | ident "=" ident | "In[" ident "](" ident ")"
//!           | "true" | "false" | "(" formula ")"
//! ```

mod parser;
mod validate;

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::cardinality::CardinalityClass;

pub use parser::{parse_formula, ParseError};
pub use validate::{validate, ValidationError};

/// Byte range in the source text. Spans never affect equality.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    fn to(self, other: Span) -> Span {
        Span::new(self.start, other.end)
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl Hash for Span {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: String,
    pub span: Span,
}

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var {
            name: name.into(),
            span: Span::default(),
        }
    }
}

/// Cardinal argument of `Ecard`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cardinal {
    Finite(u64),
    Aleph0,
    Continuum,
}

impl Cardinal {
    pub fn matches(self, c: CardinalityClass) -> bool {
        match self {
            Cardinal::Finite(n) => c.count() == Some(n),
            Cardinal::Aleph0 => c == CardinalityClass::CountablyInfinite,
            Cardinal::Continuum => c == CardinalityClass::Uncountable,
        }
    }
}

impl fmt::Display for Cardinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinal::Finite(n) => write!(f, "{n}"),
            Cardinal::Aleph0 => write!(f, "aleph0"),
            Cardinal::Continuum => write!(f, "continuum"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
    ExistsInf,
    ExistsCard(Cardinal),
    ExistsMod { t: u64, k: u64 },
}

impl Quantifier {
    /// Evaluated by counting rather than compiled.
    pub fn is_counting(self) -> bool {
        !matches!(self, Quantifier::Exists | Quantifier::Forall)
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantifier::Exists => write!(f, "E"),
            Quantifier::Forall => write!(f, "A"),
            Quantifier::ExistsInf => write!(f, "Einf"),
            Quantifier::ExistsCard(c) => write!(f, "Ecard[{c}]"),
            Quantifier::ExistsMod { t, k } => write!(f, "Emod[{t},{k}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Iff,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Implies => "=>",
            BinOp::Iff => "<=>",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool, Span),
    /// `x -> y`: `y` is the image of `x`.
    Rel(Var, Var),
    Eq(Var, Var),
    Pred(String, Var, Span),
    Not(Box<Formula>, Span),
    Binary(BinOp, Box<Formula>, Box<Formula>, Span),
    Quant(Quantifier, Vec<Var>, Box<Formula>, Span),
    /// The two bodies define sets of equal cardinality.
    Haertig(Vec<Var>, Box<Formula>, Box<Formula>, Span),
}

fn vars(names: &[&str]) -> Vec<Var> {
    names.iter().map(|n| Var::new(*n)).collect()
}

impl Formula {
    pub fn rel(x: &str, y: &str) -> Self {
        Formula::Rel(Var::new(x), Var::new(y))
    }

    pub fn eq(x: &str, y: &str) -> Self {
        Formula::Eq(Var::new(x), Var::new(y))
    }

    pub fn pred(name: &str, x: &str) -> Self {
        Formula::Pred(name.to_string(), Var::new(x), Span::default())
    }

    pub fn constant(b: bool) -> Self {
        Formula::Const(b, Span::default())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f), Span::default())
    }

    pub fn binary(op: BinOp, a: Formula, b: Formula) -> Self {
        Formula::Binary(op, Box::new(a), Box::new(b), Span::default())
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::binary(BinOp::And, a, b)
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::binary(BinOp::Or, a, b)
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::binary(BinOp::Implies, a, b)
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::binary(BinOp::Iff, a, b)
    }

    /// Conjunction of all parts; `true` when empty.
    pub fn all(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::constant(true))
    }

    pub fn quant(q: Quantifier, names: &[&str], body: Formula) -> Self {
        Formula::Quant(q, vars(names), Box::new(body), Span::default())
    }

    pub fn exists(names: &[&str], body: Formula) -> Self {
        Formula::quant(Quantifier::Exists, names, body)
    }

    pub fn forall(names: &[&str], body: Formula) -> Self {
        Formula::quant(Quantifier::Forall, names, body)
    }

    pub fn haertig(names: &[&str], left: Formula, right: Formula) -> Self {
        Formula::Haertig(vars(names), Box::new(left), Box::new(right), Span::default())
    }

    pub fn span(&self) -> Span {
        match self {
            Formula::Rel(x, y) | Formula::Eq(x, y) => x.span.to(y.span),
            Formula::Const(_, s)
            | Formula::Pred(_, _, s)
            | Formula::Not(_, s)
            | Formula::Binary(_, _, _, s)
            | Formula::Quant(_, _, _, s)
            | Formula::Haertig(_, _, _, s) => *s,
        }
    }

    /// Free variables, sorted by name.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        let mut see = |v: &Var, bound: &Vec<&str>| {
            if !bound.contains(&v.name.as_str()) {
                out.insert(v.name.clone());
            }
        };
        match self {
            Formula::Const(..) => {}
            Formula::Rel(x, y) | Formula::Eq(x, y) => {
                see(x, bound);
                see(y, bound);
            }
            Formula::Pred(_, x, _) => see(x, bound),
            Formula::Not(f, _) => f.collect_free(bound, out),
            Formula::Binary(_, a, b, _) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant(_, vs, body, _) => {
                let n = bound.len();
                bound.extend(vs.iter().map(|v| v.name.as_str()));
                body.collect_free(bound, out);
                bound.truncate(n);
            }
            Formula::Haertig(vs, a, b, _) => {
                let n = bound.len();
                bound.extend(vs.iter().map(|v| v.name.as_str()));
                a.collect_free(bound, out);
                b.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// Quantifier nesting depth.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Const(..) | Formula::Rel(..) | Formula::Eq(..) | Formula::Pred(..) => 0,
            Formula::Not(f, _) => f.depth(),
            Formula::Binary(_, a, b, _) => a.depth().max(b.depth()),
            Formula::Quant(_, _, f, _) => 1 + f.depth(),
            Formula::Haertig(_, a, b, _) => 1 + a.depth().max(b.depth()),
        }
    }
}

fn write_binder(f: &mut fmt::Formatter<'_>, vs: &[Var]) -> fmt::Result {
    if let [v] = vs {
        write!(f, "{}", v.name)
    } else {
        let names: Vec<&str> = vs.iter().map(|v| v.name.as_str()).collect();
        write!(f, "({})", names.join(","))
    }
}

/// Fully parenthesised; parses back to an equal formula.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(b, _) => write!(f, "{b}"),
            Formula::Rel(x, y) => write!(f, "{}->{}", x.name, y.name),
            Formula::Eq(x, y) => write!(f, "{}={}", x.name, y.name),
            Formula::Pred(p, x, _) => write!(f, "In[{p}]({})", x.name),
            Formula::Not(g, _) => write!(f, "~{g}"),
            Formula::Binary(op, a, b, _) => write!(f, "({a} {} {b})", op.symbol()),
            Formula::Quant(q, vs, body, _) => {
                write!(f, "({q} ")?;
                write_binder(f, vs)?;
                write!(f, ". {body})")
            }
            Formula::Haertig(vs, a, b, _) => {
                write!(f, "(H ")?;
                write_binder(f, vs)?;
                write!(f, ". ({a} ; {b}))")
            }
        }
    }
}
