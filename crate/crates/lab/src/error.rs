use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{what}: {size} states exceeds the enumeration limit {limit}")]
    GuardExceeded { what: &'static str, size: f64, limit: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] recolour_core::Error),
}

pub type LabResult<T> = Result<T, LabError>;

pub(crate) fn guard(what: &'static str, size: f64, limit: f64) -> LabResult<()> {
    if size > limit {
        Err(LabError::GuardExceeded { what, size, limit })
    } else {
        Ok(())
    }
}
