use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse distribution spec `{text}`: {reason}")]
    SpecParse { text: String, reason: String },

    #[error("poisson draw exceeded {cap} multiplications (lambda = {lambda})")]
    PoissonOverflow { lambda: f64, cap: usize },

    #[error("allocation of {n} keys failed for {spec}")]
    Allocation { spec: String, n: usize },

    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),

    #[error("cannot aggregate an empty list of trial values")]
    EmptyAggregate,

    #[error("fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("fit inputs must be equally long: {ns} sizes vs {ys} values")]
    LengthMismatch { ns: usize, ys: usize },

    #[error("sizes must be strictly ascending")]
    UnsortedSizes,

    #[error("degenerate design for class {class}: all model values are equal")]
    DegenerateDesign { class: String },

    #[error("no candidate classes given")]
    NoCandidates,

    #[error("unknown complexity class `{0}`")]
    UnknownClass(String),

    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: u64, reason: String },

    #[error("fixture integrity check failed: {0}")]
    Fixture(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
