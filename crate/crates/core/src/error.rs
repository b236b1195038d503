use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} index {index} out of range (limit {limit})")]
    Index {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid sensor configuration: {0}")]
    Config(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("format error: {0}")]
    Format(String),

    #[error(
        "dimension mismatch: expected {expected_lasers}x{expected_steps}, got {lasers}x{steps}"
    )]
    Dimensions {
        expected_lasers: usize,
        expected_steps: usize,
        lasers: usize,
        steps: usize,
    },

    #[error("steps must arrive in order: expected step {expected}, got {got}")]
    OutOfOrder { expected: usize, got: usize },

    #[error("subcluster store contract violated: {0}")]
    Contract(String),

    #[error("invalid scene: {0}")]
    Scene(String),

    #[error("{0}")]
    TooLarge(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
