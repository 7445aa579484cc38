use gic_core::GicError;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Core(#[from] GicError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Invalid parameters are configuration errors; numerical failures during
    /// a run are validation failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(
                GicError::NonWeakRegime { .. }
                | GicError::NonPositive { .. }
                | GicError::InvalidArgument(_)
                | GicError::BadDelta(_),
            ) => 2,
            _ => 1,
        }
    }
}
