use std::path::PathBuf;

/// Errors surfaced by the command line, each mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot parse {path}: {source}")]
    Toml {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error(transparent)]
    Core(#[from] qls_core::Error),
}

pub type CliResult<T> = Result<T, CliError>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_INSUFFICIENT_DATA: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use qls_core::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Config(_) | CliError::Toml { .. } | CliError::Io { .. } | CliError::Csv { .. } => EXIT_CONFIG,
            CliError::Core(e) => match e {
                E::Config(_) | E::Domain(_) => EXIT_CONFIG,
                E::InsufficientData(_) => EXIT_INSUFFICIENT_DATA,
                E::Instability { .. }
                | E::Integrator { .. }
                | E::Numerical(_)
                | E::OutOfRange(_)
                | E::DegenerateContrast(_)
                | E::SignConvention(_)
                | E::DegenerateFit(_)
                | E::Precision(_) => EXIT_NUMERICAL,
            },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        CliError::Csv {
            path: path.into(),
            source,
        }
    }
}
