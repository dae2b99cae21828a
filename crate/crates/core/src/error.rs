use thiserror::Error;

/// Errors raised by the module, operator and verification layers.
///
/// Variants fall into three groups: input errors (bad indices, mismatched
/// shapes), domain errors (an operation asked for something the mathematics
/// does not allow, such as a square root of a non-positive element), and
/// precondition errors on the theorem checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("character index {index} out of range for a spectrum of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("algebra elements live over different character spaces")]
    SpaceMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("element is not positive at character {index} (value {re}{im:+}i)")]
    NotPositive { index: usize, re: f64, im: f64 },
    #[error("fiber {character} has zero norm, cannot normalize there")]
    ZeroFiber { character: usize },
    #[error("operator is not self-adjoint (deviation {deviation:e})")]
    NotSelfAdjoint { deviation: f64 },
    #[error("operator is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for errors caused by malformed or inconsistent input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::IndexOutOfRange { .. }
                | Error::SpaceMismatch
                | Error::ShapeMismatch(_)
                | Error::InvalidShape(_)
                | Error::InvalidParameter(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
