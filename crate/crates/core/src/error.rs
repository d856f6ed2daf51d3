use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("mapping is a partial bijection: {unmapped} logical qubit(s) still unmapped")]
    IncompleteMapping { unmapped: usize },

    #[error("invalid mapping: {0}")]
    InvalidMapping(String),

    #[error("node count mismatch: expected {expected}, found {found}")]
    NodeCountMismatch { expected: usize, found: usize },

    #[error("no duration known for gate `{0}`")]
    UnknownGate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance incompatible with environment: {0}")]
    IncompatibleInstance(String),

    #[error("environment has not been reset")]
    NotReset,

    #[error("episode is over; call reset before stepping again")]
    EpisodeOver,

    #[error("episode has not terminated yet")]
    NotTerminated,

    #[error("{problem} exceeds the oracle bound: {found} > {limit}")]
    OracleBound {
        problem: &'static str,
        limit: usize,
        found: usize,
    },
}
