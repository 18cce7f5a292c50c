use std::fmt;

use thiserror::Error;

/// Which convergence condition a product violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Divergence {
    /// Numerator and denominator degrees differ.
    Degree { numerator: i64, denominator: i64 },
    /// Degrees agree but the leading coefficients do not (net scale is not 1).
    LeadingCoefficient { ratio: String },
    /// Balanced, but the sums of roots differ; only ±1 exponents converge.
    RootSum { numerator: String, denominator: String },
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Degree { numerator, denominator } => {
                write!(f, "numerator and denominator must have the same degree (got {numerator} and {denominator})")
            }
            Divergence::LeadingCoefficient { ratio } => {
                write!(f, "numerator and denominator must have the same leading coefficient (ratio is {ratio})")
            }
            Divergence::RootSum { numerator, denominator } => write!(
                f,
                "numerator and denominator must have the same sum of roots (got {numerator} and {denominator})"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("product diverges: {0}")]
    Divergent(Divergence),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("{name} is stored to {available} digits, {requested} requested")]
    Capability { name: &'static str, requested: u32, available: u32 },

    #[error("consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn eval(msg: impl Into<String>) -> Self {
        Error::Evaluation(msg.into())
    }

    /// True for errors caused by the mathematics of the request rather than
    /// by its syntax.
    pub fn is_mathematical(&self) -> bool {
        !matches!(self, Error::Parse { .. } | Error::Input(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
