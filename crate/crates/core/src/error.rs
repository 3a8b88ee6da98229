use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("invalid interval [{start},{end}]: start is after end")]
    InvertedInterval { start: i64, end: i64 },

    #[error("unknown concept `{0}`")]
    UnknownConcept(String),

    #[error("no bin of concept `{concept}` (context `{context}`) matches value {value}")]
    NoMatchingBin {
        concept: String,
        context: String,
        value: f64,
    },

    #[error("duplicate entity id `{0}`")]
    DuplicateEntity(String),

    #[error("pair is not in lexicographic order")]
    NotLexicographic,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("discretization failed: {0}")]
    Discretization(String),

    #[error("oracle refused input: {0}")]
    OracleLimit(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<String>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
