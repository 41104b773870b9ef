/// Errors reported by the solver, the oracles and the imaging toolbox.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied parameter violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The configured step size is not strictly below the admissible bound.
    #[error("step size {step} is not below the admissible bound {bound}; \
             set `allow_unsafe_step` to run anyway")]
    StepSizeRejected { step: f64, bound: f64 },

    /// A proximal oracle could not produce a minimizer.
    #[error("prox oracle failure: {0}")]
    Oracle(String),

    /// A non-finite value (NaN or infinity) appeared where a finite one is required.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Vector or image dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A file does not conform to the expected format.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
