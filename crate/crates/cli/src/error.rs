use thiserror::Error;

/// Exit statuses of the `bangbang` binary.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const ASSERTION: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const RESOURCE: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    /// The config does not match the schema; `line` is 1-based.
    #[error("{origin}:{line}: {message}")]
    Schema { origin: String, line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] bangbang::Error),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        use bangbang::Error as E;
        match self {
            CliError::Schema { .. } | CliError::Usage(_) => exit::USAGE,
            CliError::Library(E::Domain(_) | E::Argument(_) | E::Precondition(_)) => exit::USAGE,
            CliError::Library(E::Resource(_) | E::Numeric(_)) | CliError::Output { .. } => exit::RESOURCE,
            // a pathwise invariant broke: that is a failed assertion
            CliError::Library(E::Internal(_)) => exit::ASSERTION,
        }
    }
}
