use thiserror::Error;

use crate::layout::Layout;

/// A problem found while reading a graph file, tied to the offending line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("graph is disconnected: vertices {0} and {1} are not reachable from each other")]
    Disconnected(usize, usize),

    #[error("invalid size parameter: {0}")]
    InvalidSize(String),

    #[error("dimension mismatch: expected {expected} vertices, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("need at least {required} vertices, found {found}")]
    TooFewVertices { required: usize, found: usize },

    #[error("vertices {0} and {1} coincide")]
    CoincidentPoints(usize, usize),

    #[error("layout is degenerate: all points coincide")]
    DegenerateLayout,

    #[error("non-finite coordinate at vertex {0}")]
    NonFinite(usize),

    #[error("iteration {t} out of range for a schedule of {t_max} iterations")]
    IterationOutOfRange { t: usize, t_max: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("power iteration did not converge within {iterations} iterations")]
    NotConverged {
        iterations: usize,
        partial: Box<Layout>,
    },

    #[error("stress increased from {before} to {after} at iteration {iteration} of a majorization run")]
    NonMonotone {
        iteration: usize,
        before: f64,
        after: f64,
    },

    #[error("no baseline (smacof x cmds) runs for graph `{0}`")]
    MissingBaseline(String),

    #[error("failed to load graph `{name}`: {source}")]
    GraphLoad {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
