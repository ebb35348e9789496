//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A model invariant is violated; the message names the first violation.
    #[error("model: {0}")]
    Model(String),

    /// A sampling plan parameter is out of range.
    #[error("sampling plan: {0}")]
    Plan(String),

    /// A time argument lies outside the span covered by a grid.
    #[error("time {t} outside span [{lo}, {hi}]")]
    OutOfSpan { t: f64, lo: f64, hi: f64 },

    /// A grid is too small or otherwise unusable for the requested operation.
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("estimator: {0}")]
    Estimator(String),

    #[error("simulation: {0}")]
    Simulation(String),

    /// Monte Carlo failure, tagged with the replicate that produced it.
    #[error("replicate {rep}: {source}")]
    Replicate {
        rep: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn in_replicate(self, rep: usize) -> Self {
        Error::Replicate {
            rep,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
