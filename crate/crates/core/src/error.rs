use thiserror::Error;

/// Errors raised by the arithmetic layer, the Wach-module builder and the
/// mod-p pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("ring mismatch between operands")]
    RingMismatch,
    #[error("element is not a unit: {0}")]
    NotUnit(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("invalid substitution: {0}")]
    Substitution(String),
    #[error("insufficient guard precision for gamma exponent: have {have} p-adic digits, need {need}")]
    Guard { have: u32, need: u32 },
    #[error("denominator budget exceeded: need shift {need}, budget {budget}")]
    Budget { need: u32, budget: u32 },
    #[error("tail bound violated: {0}")]
    TailBound(String),
    #[error("integrality assertion failed: {0}")]
    Integrality(String),
    #[error("divisibility assertion failed: {0}")]
    Divisibility(String),
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("check `{check}` failed: {detail}")]
    CheckFailed { check: String, detail: String },
    #[error("pipeline and formula disagree: {0}")]
    Mismatch(String),
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn check(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::CheckFailed {
            check: check.into(),
            detail: detail.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
