use thiserror::Error;

/// Errors raised by the numerical routines and the spec-file front end.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("tolerance not met in {context}: estimated error {estimate:.3e} > requested {requested:.3e}")]
    ToleranceNotMet {
        context: String,
        estimate: f64,
        requested: f64,
    },

    #[error("tail bound {bound:.3e} exceeds requested tolerance {requested:.3e}")]
    TailBoundExceeded { bound: f64, requested: f64 },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("insufficient grid: {0}")]
    InsufficientGrid(String),

    #[error("boundary leakage: {0}")]
    BoundaryLeakage(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("hypothesis check failed: {}", failed.join(", "))]
    Hypothesis { failed: Vec<String> },

    #[error("{}", format_parse_errors(.0))]
    Parse(Vec<ParseError>),
}

/// A spec-file problem anchored to a 1-based line number (0 when the problem
/// concerns the document as a whole, e.g. a missing key).
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line == 0 {
            write!(f, "spec: {}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

fn format_parse_errors(errors: &[ParseError]) -> String {
    errors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
