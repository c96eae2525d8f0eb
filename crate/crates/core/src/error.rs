use thiserror::Error;

use crate::exprlang::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    /// `f` must map `[0, ∞)` into `[0, ∞)`.
    #[error("hypothesis H1 violated: {0}")]
    HypothesisH1(String),
    /// `a` must be nonnegative with `0 < ∫a < 1`.
    #[error("hypothesis H2 violated: {0}")]
    HypothesisH2(String),
    #[error("non-finite value at x = {at}")]
    NonFinite { at: f64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("evaluation failed at x = {at}: {source}")]
    Eval { at: f64, source: EvalError },
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(self, Error::HypothesisH1(_) | Error::HypothesisH2(_))
    }
}
