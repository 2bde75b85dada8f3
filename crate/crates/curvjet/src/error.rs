use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("{field}: {message}")]
    Invalid { field: String, message: String },

    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] curvjet_core::Error),
}

impl CliError {
    /// 2 for bad input (config, flags, points outside the domain), 1 for
    /// evaluation failures.
    pub fn exit_code(&self) -> u8 {
        use curvjet_core::Error as E;
        match self {
            CliError::Core(
                E::OutsideDomain { .. }
                | E::InvalidSpec(_)
                | E::DimensionMismatch { .. }
                | E::OrderOutOfRange(_)
                | E::UnknownTolerance(_),
            ) => 2,
            CliError::Core(_) => 1,
            _ => 2,
        }
    }
}
