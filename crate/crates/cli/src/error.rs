use std::path::PathBuf;

use thiserror::Error;

/// A syntax error in a structure or extension file, located by 1-based
/// line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },

    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("{stage}: {source}")]
    Stage { stage: &'static str, source: lquasi::Error },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search budget of {budget} nodes exhausted")]
    BudgetExhausted { budget: u64 },
}

impl CliError {
    pub fn stage(stage: &'static str) -> impl FnOnce(lquasi::Error) -> CliError {
        move |source| CliError::Stage { stage, source }
    }

    pub fn is_capacity(&self) -> bool {
        matches!(self, CliError::Stage { source, .. } if source.is_capacity())
            || matches!(self, CliError::BudgetExhausted { .. })
    }

    /// 2 for bad input, 3 for exceeded limits.
    pub fn exit_code(&self) -> i32 {
        if self.is_capacity() {
            3
        } else {
            2
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
