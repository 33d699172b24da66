use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("integer overflow while counting regions: {0}")]
    Overflow(String),

    #[error("linear program failed: {0}")]
    LinearProgram(String),

    #[error(
        "combined noise is correlated (max |VV^T| off-diagonal = {0:e}); \
         use the Monte-Carlo transition estimator instead"
    )]
    CorrelatedNoise(f64),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("rank-deficient channel: {0}")]
    RankDeficient(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
