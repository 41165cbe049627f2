use thiserror::Error;

/// Errors raised by graph construction, solvers and property checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid boundary partition: {0}")]
    InvalidPartition(String),

    #[error("vertex {0} has no neighbors")]
    DegenerateVertex(usize),

    #[error("oracle integrity violated: {0}")]
    OracleIntegrity(String),

    #[error("right-hand side changes sign (f({positive}) > 0 > f({negative})); bounded solutions need not be unique")]
    SignChangingRhs { positive: usize, negative: usize },

    #[error("solver did not converge after {iterations} sweeps (last update {last_update:e})")]
    NonConvergence { iterations: usize, last_update: f64 },

    #[error("precondition violated at vertex {vertex}: {reason}")]
    Precondition { vertex: usize, reason: String },

    #[error("property `{property}` violated at vertex {vertex}: {detail}")]
    PropertyViolation {
        property: String,
        vertex: usize,
        detail: String,
    },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("sup-path-sum diverges at vertex {vertex}; no sublinear solution exists")]
    NoSublinearSolution { vertex: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
