use thiserror::Error;

use crate::rat::Rat;
use crate::registry::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    ZeroDivision,

    #[error("element count {requested} exceeds the configured cap of {cap}")]
    CapExceeded { requested: String, cap: u64 },

    #[error("broken chain invariant at segment {segment}: {message}")]
    BrokenInvariant { segment: usize, message: String },

    #[error("degenerate generator: the bump encloses no area")]
    DegenerateGenerator,

    #[error("degenerate segment: endpoints coincide")]
    DegenerateSegment,

    #[error("construction `{0}` has no geometric realization (series only)")]
    NotRealizable(String),

    #[error("unknown construction `{0}`")]
    UnknownName(String),

    #[error("parse error: {message}")]
    Parse { message: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Document {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid construction: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("no finite bound: area ratio {beta} is not below 1")]
    Unbounded { beta: Rat },
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
