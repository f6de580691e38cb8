use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("unknown mutant `{0}`")]
    UnknownMutant(String),

    #[error("block `{block}` cannot be comment-wrapped: {reason}")]
    WrapFailure { block: String, reason: String },

    #[error("variants `{first}` and `{second}` map to the same flag `{flag}`")]
    FlagCollision {
        first: String,
        second: String,
        flag: String,
    },

    #[error("malformed diff: {0}")]
    MalformedDiff(String),

    #[error("hunk {hunk} does not apply at line {line}: expected {expected:?}, found {found:?}")]
    ContextMismatch {
        hunk: usize,
        line: usize,
        expected: String,
        found: String,
    },

    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },

    #[error("block `{block}`: pattern not found at {scope}")]
    ScopeMiss { block: String, scope: String },

    #[error("block `{block}`: neither the match nor the active replacement is present at {scope}")]
    AmbiguousState { block: String, scope: String },

    #[error("{path}:{line}: malformed mutation marker: {message}")]
    MalformedMarker {
        path: String,
        line: usize,
        message: String,
    },

    #[error("block `{0}` has no enclosing syntactic unit valid for every variant")]
    NoValidUnit(String),

    #[error("block `{block}` is not normalized: {reason}")]
    NotNormalized { block: String, reason: String },

    #[error("syntax error at offset {position}: expected {expected}")]
    Syntax { position: usize, expected: String },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("`{0}` names both a mutant and a mutation")]
    AmbiguousName(String),

    #[error("tag `{0}` matches no mutant")]
    EmptyTag(String),

    #[error("`{first}` and `{second}` belong to mutation `{block}` and cannot be active together")]
    MutualExclusion {
        block: String,
        first: String,
        second: String,
    },

    #[error("invalid timing input: {0}")]
    Domain(String),

    #[error("record {index}: {message}")]
    Record { index: usize, message: String },

    #[error("name `{0}` is already taken")]
    NameCollision(String),

    #[error("failed to spawn `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },

    #[error("state file {path}: {message}")]
    State { path: PathBuf, message: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// Wraps this error with the name of the block it concerns, when the
    /// variant does not already carry one.
    pub fn in_block(self, block: &str) -> Self {
        match self {
            Error::Parse {
                path,
                line,
                message,
            } => Error::Parse {
                path,
                line,
                message: format!("block `{block}`: {message}"),
            },
            other => other,
        }
    }

    /// Process exit status for the command-line tool: 3 when activating or
    /// restoring files failed, 2 for every other error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::WrapFailure { .. }
            | Error::ContextMismatch { .. }
            | Error::AmbiguousState { .. }
            | Error::Io { .. } => 3,
            _ => 2,
        }
    }
}
