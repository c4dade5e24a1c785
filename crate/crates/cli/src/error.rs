use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

/// Everything that ends a run early. All of these map to exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("{}`{key}`: {message}", line_prefix(*.line))]
    BadValue {
        line: Option<usize>,
        key: String,
        message: String,
    },

    #[error("{0}")]
    Invalid(#[from] ofdm_sync::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: CSV file not found", .0.display())]
    MissingCsv(PathBuf),

    #[error("{}: {message}", path.display())]
    BadPath { path: PathBuf, message: String },
}

fn line_prefix(line: Option<usize>) -> String {
    line.map_or_else(String::new, |l| format!("line {l}: "))
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        2
    }
}
