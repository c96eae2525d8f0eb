use std::fmt;

use fourbvp_core::Error;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    Ok = 0,
    LemmaViolation = 1,
    HypothesisViolation = 2,
    ParseError = 3,
    NonConvergence = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn is_ok(self) -> bool {
        self == ExitStatus::Ok
    }

    /// The first failure wins.
    pub fn then(self, other: ExitStatus) -> ExitStatus {
        if self.is_ok() {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for ExitStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ExitStatus::Ok => "ok",
            ExitStatus::LemmaViolation => "lemma violation",
            ExitStatus::HypothesisViolation => "hypothesis violation",
            ExitStatus::ParseError => "parse error",
            ExitStatus::NonConvergence => "non-convergence",
        };
        write!(f, "{name} (exit {})", self.code())
    }
}

/// A failure that ends a command before it produces its normal report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub status: ExitStatus,
    pub message: String,
}

impl CliError {
    pub fn new(status: ExitStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(ExitStatus::ParseError, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: {}", self.message)
    }
}

impl std::error::Error for CliError {}

/// Invalid input is a parse error; anything that says `f` or `a` is not
/// admissible (including `f` failing to evaluate) is a hypothesis violation.
impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Argument(_) | Error::Parse(_) => ExitStatus::ParseError,
            Error::HypothesisH1(_) | Error::HypothesisH2(_) | Error::Eval { .. } => {
                ExitStatus::HypothesisViolation
            }
            Error::NonFinite { .. } => ExitStatus::NonConvergence,
        };
        CliError::new(status, e.to_string())
    }
}
