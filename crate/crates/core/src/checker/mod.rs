//! Compiles formulas to Büchi automata over convolutions of folded
//! configurations and decides sentences.

mod compile;
mod eval;
mod presets;

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::automata::AutomatonError;
use crate::ca::{CaError, CaRule, Presentation, UPConfiguration};
use crate::cardinality::{CardinalityClass, CardinalityError};
use crate::logic::{parse_formula, validate, Formula, ParseError, ValidationError};

pub use compile::Compiled;
pub use presets::{CycleReport, FixedPointReport, PresetReport};

/// Default cap on the number of states of any constructed automaton.
pub const DEFAULT_STATE_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("invalid formula: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<ValidationError>),
    #[error("formula has free variables {0:?}")]
    NotASentence(Vec<String>),
    #[error("resource limit: {0}")]
    Resource(AutomatonError),
    #[error(transparent)]
    Automaton(AutomatonError),
    #[error(transparent)]
    Ca(#[from] CaError),
    #[error(transparent)]
    Cardinality(CardinalityError),
    #[error("the claim is false; no witness exists")]
    Unsat,
    #[error("witness for `{0}` failed direct re-evaluation")]
    WitnessRejected(String),
}

impl From<AutomatonError> for CheckError {
    fn from(e: AutomatonError) -> Self {
        match e {
            AutomatonError::BudgetExceeded { .. } | AutomatonError::ComplementTooLarge { .. } => {
                CheckError::Resource(e)
            }
            other => CheckError::Automaton(other),
        }
    }
}

impl From<CardinalityError> for CheckError {
    fn from(e: CardinalityError) -> Self {
        match e {
            CardinalityError::Automaton(a) => a.into(),
            other => CheckError::Cardinality(other),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub state_budget: usize,
    /// k-cycles have least period exactly k (otherwise any period dividing k).
    pub exact_cycles: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            state_budget: DEFAULT_STATE_BUDGET,
            exact_cycles: true,
        }
    }
}

/// Size of one intermediate automaton.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub node: String,
    pub states: usize,
    pub transitions: usize,
}

/// A counting subformula that was evaluated to a constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Evaluated {
    pub formula: String,
    pub cardinality: Vec<CardinalityClass>,
    pub value: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub max_states: usize,
    pub stages: Vec<Stage>,
    pub evaluated: Vec<Evaluated>,
}

impl Stats {
    fn record(&mut self, node: impl Into<String>, a: &crate::automata::BuchiAutomaton) {
        self.max_states = self.max_states.max(a.state_count());
        self.stages.push(Stage {
            node: node.into(),
            states: a.state_count(),
            transitions: a.transition_count(),
        });
    }
}

/// Outcome of deciding a sentence.
///
/// Wall time is kept out of the serialized form so that equal inputs give
/// byte-identical JSON.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub formula: String,
    pub result: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cardinality: Option<CardinalityClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<String, String>>,
    pub stats: Stats,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// A rule with its presentation, predicate registry and options.
#[derive(Clone, Debug)]
pub struct Checker {
    presentation: Presentation,
    options: Options,
}

impl Checker {
    pub fn new(rule: CaRule) -> Self {
        Checker::with_options(rule, Options::default())
    }

    pub fn with_options(rule: CaRule, options: Options) -> Self {
        Checker {
            presentation: Presentation::new(rule),
            options,
        }
    }

    pub fn rule(&self) -> &CaRule {
        self.presentation.rule()
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn presentation_mut(&mut self) -> &mut Presentation {
        &mut self.presentation
    }

    pub fn options(&self) -> Options {
        self.options
    }

    /// Registers a predicate usable as `In[name](x)`.
    pub fn register_predicate(
        &mut self,
        name: &str,
        automaton: crate::automata::BuchiAutomaton,
    ) -> Result<(), CheckError> {
        Ok(self.presentation.register_predicate(name, automaton)?)
    }

    /// Registers the singleton predicate `{c}`.
    pub fn register_configuration(&mut self, name: &str, c: &UPConfiguration) -> Result<(), CheckError> {
        let a = self.presentation.singleton(c)?;
        self.register_predicate(name, a)
    }

    pub fn parse_configuration(&self, literal: &str) -> Result<UPConfiguration, CheckError> {
        Ok(UPConfiguration::parse(literal, self.rule().states())?)
    }

    pub fn configuration_literal(&self, c: &UPConfiguration) -> String {
        c.to_literal(self.rule().states())
    }

    /// Parses and validates a formula with the given free variables.
    pub fn parse(&self, text: &str, free: &[&str]) -> Result<Formula, CheckError> {
        let f = parse_formula(text)?;
        self.validate(&f, free)?;
        Ok(f)
    }

    pub fn validate(&self, f: &Formula, free: &[&str]) -> Result<(), CheckError> {
        validate(f, free, |p| self.presentation.has_predicate(p)).map_err(CheckError::Invalid)
    }

    /// Parses and decides a sentence.
    pub fn check(&self, text: &str) -> Result<Verdict, CheckError> {
        let f = parse_formula(text)?;
        self.decide(&f)
    }
}
