use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed clitic markers: {0}")]
    MalformedMarkers(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("target vocabulary {target} must exceed the initial alphabet size {alphabet}")]
    VocabTooSmall { target: usize, alphabet: usize },

    #[error("corpus contains the reserved end-of-word symbol {0:?}")]
    ReservedSymbol(char),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid fraction list: {0}")]
    BadFraction(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("empty hypothesis set")]
    EmptyHypothesisSet,

    #[error("oracle selection requires references")]
    MissingReferences,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{}:{line}: {message}", path.display())]
    Data {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the filesystem or stream layer rather than of
    /// the data itself.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
