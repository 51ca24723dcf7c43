//! Workbench for finite Heyting algebras with involution.
//!
//! Algebras are given by a bounded distributive order and an involution
//! `∼` satisfying `∼(a ∨ b) = ∼a ∧ ∼b` and `∼∼a = a`. On top of that the
//! crate enumerates filters and congruences, decides subdirect
//! irreducibility through the involutive center, synthesizes killer and
//! discriminator terms, builds direct and finite Boolean powers, and searches
//! for counterexamples to injectivity within explicit bounds.

pub mod algebra;
pub mod catalog;
pub mod discriminator;
pub mod error;
pub mod filters;
pub mod format;
pub mod power;
pub mod term;

pub use algebra::{FinitePoset, HIAlgebra, HiOps, Law, ValidationReport};
pub use error::{Error, Result};
pub use term::{parse_term, Term};

pub(crate) fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(
    value: &T,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_str(value)
}
