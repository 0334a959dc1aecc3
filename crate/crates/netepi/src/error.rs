//! Error type shared by every module in the crate.

use thiserror::Error;

/// Everything that can go wrong when building distributions, graphs, plans,
/// or running the analytics.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument is outside its domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The requested operation is not defined for this weight model kind.
    #[error("{kind} weights do not support {what}")]
    Unsupported { kind: &'static str, what: &'static str },

    /// A vaccination strategy was paired with an incompatible weight model.
    #[error("the {strategy} strategy requires {requirement}")]
    StrategyMismatch {
        strategy: &'static str,
        requirement: &'static str,
    },

    /// A config file or spec string could not be parsed. `line` is 1-based;
    /// line 0 means the text came from a command-line argument.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Root finding detected a bracket that is not monotone in the parameter.
    #[error("bisection aborted, reproduction number is not monotone: {0}")]
    NonMonotone(String),

    /// Too few simulation runs produced the statistic being estimated.
    #[error("only {got} runs produced second-generation cases (need {need})")]
    InsufficientSamples { got: usize, need: usize },

    /// An epidemic cannot start because the plan vaccinated every vertex.
    #[error("every vertex is vaccinated; no initial case can be chosen")]
    AllVaccinated,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
