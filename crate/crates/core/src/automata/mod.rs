//! Nondeterministic Büchi automata over multi-track alphabets and their
//! closure algebra.

mod alphabet;
mod buchi;
mod complement;
mod lasso;
mod ops;
mod text;

use thiserror::Error;

pub use alphabet::{Alphabet, Letter, Track};
pub use buchi::{BuchiAutomaton, StateId};
pub use lasso::LassoWord;
pub use ops::UNBOUNDED;

pub(crate) use buchi::Sccs;
pub(crate) use lasso::lcm;
pub(crate) use ops::Explorer;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("alphabet mismatch: `{left}` vs `{right}`")]
    AlphabetMismatch { left: String, right: String },
    #[error("unknown track `{0}`")]
    UnknownTrack(String),
    #[error("track `{0}` already present")]
    TrackCollision(String),
    #[error("track `{0}` has no symbols")]
    EmptyTrack(String),
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("invalid symbol or identifier `{0}`")]
    InvalidSymbol(String),
    #[error("invalid letter `{0}`")]
    InvalidLetter(String),
    #[error("alphabet too large")]
    AlphabetTooLarge,
    #[error("invalid state {0}")]
    InvalidState(usize),
    #[error("lasso loop must be non-empty")]
    EmptyLoop,
    #[error("state budget of {limit} exceeded")]
    BudgetExceeded { limit: usize },
    #[error("rank-based complementation supports at most 63 states, got {states}")]
    ComplementTooLarge { states: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
