use thiserror::Error;

pub type Result<T, E = ChoError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ChoError {
    /// Rejected configuration value or unsupported layout.
    #[error("configuration error: {0}")]
    Config(String),

    /// Function called outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A protocol invariant was broken during simulation. Always a bug.
    #[error("invariant violation at t={at_ms} ms, ue {ue}: {what}")]
    Invariant { at_ms: u64, ue: usize, what: String },

    /// Event log line or event kind that this version does not understand.
    #[error("event schema error: {0}")]
    Schema(String),

    #[error("missing column `{0}` in results table")]
    MissingColumn(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl ChoError {
    pub fn config(msg: impl Into<String>) -> Self {
        ChoError::Config(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        ChoError::Domain(msg.into())
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            ChoError::Config(_) | ChoError::MissingColumn(_) | ChoError::Schema(_) => 2,
            ChoError::Invariant { .. } => 3,
            ChoError::Domain(_) | ChoError::Io(_) | ChoError::Csv(_) => 1,
        }
    }
}
