use std::path::PathBuf;

/// Process exit status of each failure class.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERIC: i32 = 3;
    pub const VERIFICATION: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {source}{}", .last_good_t.map(|t| format!(" (last good t = {t})")).unwrap_or_default())]
    Numeric {
        source: rotor_pair::Error,
        last_good_t: Option<f64>,
    },
    #[error("verification failed: {failed} of {total} checks")]
    Verification { failed: usize, total: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit_code::CONFIG,
            CliError::Numeric { .. } => exit_code::NUMERIC,
            CliError::Verification { .. } => exit_code::VERIFICATION,
            CliError::Io { .. } | CliError::Output(_) => exit_code::OTHER,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

/// Malformed inputs are configuration errors; everything else failed while computing.
impl From<rotor_pair::Error> for CliError {
    fn from(source: rotor_pair::Error) -> Self {
        use rotor_pair::Error as E;
        match source {
            E::Dimension { .. } | E::NotSkew { .. } | E::InvalidInput(_) => CliError::Config(source.to_string()),
            E::Numeric { t, .. } => CliError::Numeric { source, last_good_t: Some(t) },
            _ => CliError::Numeric { source, last_good_t: None },
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
