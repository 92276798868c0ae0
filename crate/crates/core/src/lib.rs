//! Preposition diagnosis engine for English learners of Arabic.
//!
//! The pipeline parses a short locative sentence with a bilingual
//! unification chart parser, builds a logical form, anchors its referring
//! terms to fresh discourse entities, saturates the resulting facts under a
//! knowledge base of meaning postulates, and finally runs bounded abduction
//! to explain why a preposition did or did not locate its figure with
//! respect to its ground.

pub mod abduction;
pub mod diagnostics;
pub mod exercise;
pub mod grammar;
pub mod kb;
mod language;
pub mod lattice;
pub mod lf;
pub mod model;
pub mod pipeline;
pub mod session;
pub mod term;

pub use language::{Language, UnknownLanguage};
