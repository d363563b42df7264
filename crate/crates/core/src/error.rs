use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{requested} qubits exceed the cap of {cap}")]
    QubitCap { requested: usize, cap: usize },
    #[error("unknown interaction set `{0}`")]
    UnknownInteractionSet(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("dataset has no {0} entries")]
    EmptySide(&'static str),
    #[error("missing coefficient for term instance {0}")]
    MissingCoefficient(usize),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("time {0} outside [0, 1]")]
    TimeOutOfRange(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
