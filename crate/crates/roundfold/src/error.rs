use thiserror::Error;

use crate::descriptor::DescriptorViolation;
use crate::graph::GraphViolation;

/// Crate-wide error type. Violations reported by the validators
/// ([`crate::graph::DecompositionGraph::validate`],
/// [`crate::descriptor::RoundFoldDescriptor::verify`]) are data, not errors;
/// they only become errors when an operation requires a valid input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error("invalid decomposition graph: {}", format_list(.0))]
    InvalidGraph(Vec<GraphViolation>),

    #[error("invalid descriptor: {}", format_list(.0))]
    InvalidDescriptor(Vec<DescriptorViolation>),

    #[error("graph contains genus-zero bundle pieces; reduce to pants first")]
    BundleNotReduced,

    #[error("graph is not a tree: {0}")]
    NotATree(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("piece {piece} has degree {degree}, maximum is 3")]
    DegreeExceeded { piece: usize, degree: usize },

    #[error("graph has no solid-torus leaf")]
    NoSolidTorusLeaf,

    #[error("gluing {index} between non-buffer pieces is not the plumbing matrix [[0,1],[1,0]]")]
    NotPlumbingType { index: usize },

    #[error("invalid tree labeling: {0}")]
    BadLabeling(String),

    #[error("inconsistent fiber counts at level {level}: {from} -> {to}")]
    InconsistentCounts {
        level: usize,
        from: usize,
        to: usize,
    },

    #[error("invalid event sequence: {0}")]
    MorseEvents(String),

    #[error("monodromy incompatible with events: {0}")]
    MorseMonodromy(String),

    #[error("page has non-identity monodromy")]
    NonIdentityMonodromy,

    #[error("page is closed (empty binding)")]
    ClosedPage,

    #[error("page is disconnected")]
    DisconnectedPage,

    #[error("descriptor not representable as a decomposition graph: {0}")]
    Unrepresentable(String),

    #[error("torus bundle monodromy must have determinant 1, got {0}")]
    BadMonodromyDeterminant(i64),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

fn format_list<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
