use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LbdError {
    /// A parameter lies outside its admissible domain.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A state index outside `0..=N`.
    #[error("state index {k} out of range 0..={n}")]
    Index { k: usize, n: usize },

    /// A birth or death rate vanished where the chain must be irreducible.
    #[error("chain is not irreducible: {0}")]
    Irreducible(String),

    /// The rate out of the top state vanished.
    #[error("degenerate boundary: {0}")]
    DegenerateBoundary(String),

    /// Both rates vanished at a state the simulation reached.
    #[error("model degeneracy: zero total rate at state {0}")]
    Degenerate(usize),

    /// An estimation window that contains no time.
    #[error("window error: burn-in {burn_in} is not below the end time {t_end}")]
    Window { burn_in: f64, t_end: f64 },

    /// The operation has no meaning for the requested model.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// A stored trajectory would exceed the in-memory event cap.
    #[error("trajectory exceeds {0} stored events; use the streaming occupation estimator")]
    TooManyEvents(usize),
}

pub type Result<T> = std::result::Result<T, LbdError>;

pub(crate) fn param_err(msg: impl Into<String>) -> LbdError {
    LbdError::Parameter(msg.into())
}
