use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid space spec: field `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("value {0} is outside the admissible range {1}")]
    Range(String, &'static str),

    #[error("enumeration budget exceeded: {needed} values requested, limit {limit}; reduce depth by at least {reduce_by}")]
    Budget {
        needed: u128,
        limit: usize,
        reduce_by: u32,
    },

    #[error("curve has zero derivative at the marked point")]
    DegenerateRay,

    #[error("radius grid too short: {len} scales given, at least {min} required")]
    InsufficientGrid { len: usize, min: usize },

    #[error("sequence depth {depth} is below the minimum {min}")]
    InsufficientDepth { depth: usize, min: usize },

    #[error("sphere of radius {radius} is empty, so the radius is not in R_a")]
    EmptySphere { radius: String },

    #[error("cannot evaluate: {0}")]
    CannotEvaluate(String),

    #[error("reports describe different spaces: {0} vs {1}")]
    ReportMismatch(String, String),

    #[error("witness not found: {0}")]
    WitnessNotFound(String),

    #[error("candidate {0} is not mutually stable with the constant sequence")]
    UnstableCandidate(String),

    #[error("family is not self-stable: `{x}` and `{y}` oscillate")]
    NotSelfStable { x: String, y: String },

    #[error("no limit value: {0}")]
    NoValue(String),

    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error at line {line}, column {column}: {message}")]
    Config {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
