//! Short-lex automatic structures for finitely presented groups.
//!
//! The pipeline runs Knuth-Bendix completion to collect word differences,
//! builds a word acceptor and a multiplier from them, repairs the structure
//! until it passes a partial correctness check, and finally verifies the
//! group axioms. Verified structures answer reduction, word-problem, order
//! and growth queries.

pub mod autstruct;
pub mod error;
pub mod fsa;
pub mod kb;
pub mod pipeline;
pub mod query;
pub mod words;

pub use error::{Error, Result};
