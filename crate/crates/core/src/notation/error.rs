use thiserror::Error;

use crate::rules::RuleError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotationError {
    /// Malformed move text; `column` is 1-based.
    #[error("column {column}: {message}")]
    Move { column: usize, message: String },
    /// An error inside a multi-line document; `line` is 1-based.
    #[error("line {line}: {source}")]
    Line { line: usize, source: Box<NotationError> },
    #[error("obstacle map: {0}")]
    ObstacleMap(String),
    #[error("inventory code: {0}")]
    Inventory(String),
    #[error("checksum: {0}")]
    Checksum(String),
    #[error("game log: {0}")]
    Log(String),
    #[error("level file: {0}")]
    LevelFile(String),
    #[error("state table: {0}")]
    Table(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

impl NotationError {
    pub(crate) fn at_line(self, line: usize) -> NotationError {
        NotationError::Line { line, source: Box::new(self) }
    }
}
