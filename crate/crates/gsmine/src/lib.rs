//! Mining of frequent transformation subsequences from graph-sequence
//! databases.
//!
//! A graph sequence observes one graph per step under persistent vertex
//! IDs. [`compile`] turns consecutive snapshots into minimal edit scripts
//! of six rule kinds (insert/delete/relabel a vertex or an edge);
//! [`matcher`] decides pattern inclusion and support; [`reverse`] mines
//! all relevant frequent patterns by inverting parent functions from the
//! empty sequence outward, while [`baseline`] grows every frequent
//! pattern tail-first and filters afterwards, serving as the correctness
//! oracle. [`datagen`] produces seeded synthetic databases with planted
//! patterns, and [`format`] reads and writes the text formats shared by
//! the CLI.

pub mod baseline;
pub mod canon;
pub mod compile;
pub mod datagen;
pub mod format;
pub mod ingest;
pub mod matcher;
pub mod model;
pub mod prefixspan;
pub mod reverse;

pub use matcher::MinedPattern;
pub use model::{
    GraphDatabase, GraphSequence, Label, LabeledGraph, Labels, Rule, RuleKind, Target, TrDatabase,
    TrEntry, TrSeq, VertexId,
};
