use thiserror::Error;

/// Errors raised by the QUBO model and the operations built on it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuboError {
    #[error("dimension mismatch: expected {expected} variables, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("variable index {index} out of range for {num_variables} variables")]
    IndexOutOfRange { index: usize, num_variables: usize },

    #[error("coefficient at ({i}, {j}) is not finite")]
    NonFinite { i: usize, j: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Errors raised while sampling or decomposing.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Qubo(#[from] QuboError),

    #[error("invalid sampler parameters: {0}")]
    InvalidParams(String),

    #[error("inner sampler failed at outer iteration {iteration}: {source}")]
    Inner {
        iteration: u64,
        #[source]
        source: Box<SolveError>,
    },

    #[error("{0}")]
    Other(String),
}
