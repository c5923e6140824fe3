//! Model checking for the phase space of one-dimensional cellular automata.
//!
//! Configurations in `Q^ℤ` are folded into ω-words over `Q × Q`, the
//! next-configuration relation becomes a Büchi automaton over pairs of such
//! words, and first-order sentences (with infinity, cardinality, modulo and
//! Härtig quantifiers) are compiled to automata and decided.

pub mod automata;
pub mod ca;
pub mod cardinality;
pub mod checker;
pub mod debruijn;
pub mod finite_support;
pub mod logic;
