use thiserror::Error;

/// Errors surfaced by the library.
///
/// The CLI maps these onto process exit codes: usage/parse problems exit
/// with 2, numeric failures with 3. Bound violations are not errors; they
/// are reported through [`crate::solver::BoundReport`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("infeasible point: {0}")]
    Infeasible(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Signals a broken oracle or a corrupted internal state, never bad input.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("numeric error at iteration {iteration}: {message}")]
    Numeric { iteration: usize, message: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
