//! Ontology-driven Feature Driven Development.
//!
//! The crate turns an OWL functional-syntax ontology plus SWRL-style rules
//! into the artifacts of an FDD cycle:
//!
//! * [`parser`] reads the ontology, rule and query files and writes the
//!   canonical ontology serialization.
//! * [`reasoner`] materializes domain/range/subclass typing and reports
//!   consistency violations.
//! * [`engine`] runs DL-safe rules to fixpoint and evaluates select queries.
//! * [`features`] derives the grouped feature list from object properties.
//! * [`planner`] resolves class owners and schedules features.
//! * [`codegen`] maps classes and properties onto object-oriented stubs.
//! * [`fixtures`] ships the Education example used throughout the tests.

pub mod codegen;
pub mod engine;
pub mod features;
pub mod fixtures;
pub mod model;
pub mod parser;
pub mod planner;
pub mod reasoner;
#[cfg(any(test, feature = "test-support"))]
pub mod testing;

pub use model::{local_name, Axiom, Datatype, Entity, EntityKind, Iri, Literal, Ontology, PrefixMap};
