use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two fractal measures are too close to form a difference quotient.
    #[error("ill-conditioned difference quotient between nodes {lo} and {hi}: |Δt̂| = {gap:e}")]
    IllConditioned { lo: usize, hi: usize, gap: f64 },

    /// A solver or harness was configured in a way that cannot run.
    #[error("configuration error: {0}")]
    Config(String),

    /// A singular coefficient was hit; the grid needs refining or shifting.
    #[error("singular coefficient: {0}")]
    Refinement(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
