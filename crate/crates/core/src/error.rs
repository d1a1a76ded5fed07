use thiserror::Error;

/// Errors raised by the engine. Messages name the violated precondition.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex {0:?} lies outside the window")]
    VertexOutsideWindow(Vec<i64>),

    #[error("vertex {vertex:?} has dimension {got}, lattice has dimension {expected}")]
    DimensionMismatch {
        vertex: Vec<i64>,
        got: usize,
        expected: usize,
    },

    #[error("{0:?} is not a neighbour of the projected vertex")]
    NotANeighbour(Vec<i64>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph has {edges} edges; exact enumeration supports at most {max}")]
    GraphTooLarge { edges: usize, max: usize },

    #[error("empty tally for context `{0}`")]
    EmptyTally(String),

    #[error("malformed trace at line {line}: {reason}")]
    MalformedTrace { line: usize, reason: String },

    #[error("local error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    StepTooCoarse { estimate: f64, tolerance: f64 },

    #[error("({d}, kappa={kappa}) is outside the verified range")]
    OutOfRange { d: u32, kappa: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
