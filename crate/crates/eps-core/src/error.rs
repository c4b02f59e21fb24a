use alloc::string::String;

pub type Result<T> = core::result::Result<T, EpsError>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EpsError {
    /// Structural problem with an EPS specification (level ordering,
    /// participation ranges, mismatched lengths).
    #[error("invalid EPS specification: {0}")]
    InvalidSpec(String),

    /// An input outside the mathematical domain of the operation.
    #[error("{name} out of domain: {value}")]
    Domain { name: &'static str, value: f64 },

    /// A pricing kernel produced a non-finite value.
    #[error("non-finite value in {context} at term n = {n}")]
    Numerical { context: &'static str, n: usize },

    /// The operation does not apply to this input (e.g. no protection leg).
    #[error("not applicable: {0}")]
    NotApplicable(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(EpsError::Domain { name, value })
    }
}

pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(EpsError::Domain { name, value })
    }
}

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(EpsError::Domain { name, value })
    }
}
