use thiserror::Error;

/// Error type shared by the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The exact operation would enumerate past its capacity limit.
    #[error("{op} supports n <= {limit} (cost grows as {cost}), got n = {n}; use Monte Carlo estimation for larger games")]
    Capacity {
        op: &'static str,
        n: usize,
        limit: usize,
        cost: &'static str,
    },

    /// Malformed or non-finite input data.
    #[error("invalid input: {0}")]
    Input(String),

    /// Inconsistent or out-of-range configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A selection round failed; carries the round index.
    #[error("selection round {round}: {source}")]
    Round {
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn in_round(self, round: usize) -> Self {
        Error::Round {
            round,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
