//! Cellular automata, ultimately periodic configurations and their
//! ω-automatic presentation.

mod config;
mod presentation;
mod rule;

use thiserror::Error;

use crate::automata::AutomatonError;

pub use config::UPConfiguration;
pub(crate) use config::parse_word;
pub use presentation::Presentation;
pub use rule::CaRule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaError {
    #[error("rule has no states")]
    NoStates,
    #[error("invalid state name `{0}`")]
    InvalidStateName(String),
    #[error("radius must be at least 1")]
    BadRadius,
    #[error("rule table too large")]
    TableTooLarge,
    #[error("incomplete rule table: missing `{0}`")]
    IncompleteTable(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state `{0}` is not quiescent")]
    QuiescentViolation(String),
    #[error("elementary rule code {0} is out of range 0..=255")]
    CodeOutOfRange(u32),
    #[error("bad rule spec `{0}`")]
    BadSpec(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("periods must be non-empty")]
    EmptyPeriod,
    #[error("bad configuration literal: {0}")]
    BadConfiguration(String),
    #[error("first letter is not diagonal")]
    DomainViolation,
    #[error("predicate automaton must have a single track over the pair alphabet, got `{0}`")]
    PredicateAlphabet(String),
    #[error("predicate accepts words outside the domain")]
    NotWithinDomain,
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}
