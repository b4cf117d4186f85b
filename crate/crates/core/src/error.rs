use thiserror::Error;

/// Errors raised while loading, transforming or analysing a network.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid document: {0}")]
    Schema(String),
    #[error("unknown key {key:?} in {context}")]
    UnknownKey { context: String, key: String },
    #[error("duplicate station id {0:?}")]
    DuplicateStation(String),
    #[error("duplicate section id {0:?}")]
    DuplicateSection(String),
    #[error("section {section:?} references unknown station {station:?}")]
    DanglingEndpoint { section: String, station: String },
    #[error("section {0:?} connects a station to itself")]
    SelfLoop(String),
    #[error("section {section:?}: {field} must be positive, got {value}")]
    NonPositive {
        section: String,
        field: &'static str,
        value: f64,
    },
    #[error("station {station:?}: reversal penalty must be non-negative, got {value}")]
    NegativePenalty { station: String, value: f64 },
    #[error("unknown station {0:?}")]
    UnknownStation(String),
    #[error("unknown section {0:?}")]
    UnknownSection(String),
    #[error("station {0:?} is not an eligible origin/destination")]
    IneligibleStation(String),
    #[error("origin and destination are the same station {0:?}")]
    SameStation(String),
    #[error("sections must differ, got {0:?} twice")]
    SameSection(String),
    #[error("network is disconnected: {0}")]
    DisconnectedNetwork(String),
    #[error("pair {a:?}-{b:?} has zero cost")]
    ZeroCostPair { a: String, b: String },
    #[error("section universes differ: {0}")]
    MismatchedUniverse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Data problems (bad input, unknown ids) as opposed to analysis failures.
    pub fn is_data_error(&self) -> bool {
        !matches!(
            self,
            Error::DisconnectedNetwork(_)
                | Error::ZeroCostPair { .. }
                | Error::MismatchedUniverse(_)
                | Error::Invariant(_)
        )
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
