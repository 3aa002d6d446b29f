use std::path::{Path, PathBuf};

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] cptwb::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(cptwb::Error::Numerical(_) | cptwb::Error::SearchExhausted(_)) => EXIT_NUMERICAL,
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_VALIDATION,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_kind() {
        assert_eq!(CliError::from(cptwb::Error::Numerical("x".into())).exit_code(), EXIT_NUMERICAL);
        assert_eq!(CliError::from(cptwb::Error::SearchExhausted("x".into())).exit_code(), EXIT_NUMERICAL);
        assert_eq!(CliError::from(cptwb::Error::NotPsd(-1.0)).exit_code(), EXIT_VALIDATION);
        assert_eq!(CliError::Input("x".into()).exit_code(), EXIT_VALIDATION);
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_USAGE);
    }
}
