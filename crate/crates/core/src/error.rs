use thiserror::Error;

/// Errors raised by the library. The CLI maps each variant onto an exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precision exhausted: requested depth {requested}, available {available}")]
    PrecisionExhausted { requested: usize, available: usize },

    #[error("undecidable at available precision: {0}")]
    Undecidable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not invertible: {0}")]
    NotInvertible(String),

    #[error("pole of the product at t = {t}")]
    Pole { t: u64 },

    #[error("term limit exceeded: product would store {0} terms")]
    TooManyTerms(usize),

    #[error("no convergence after {iterations} iterations (last estimate {last})")]
    NonConvergence { iterations: usize, last: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
