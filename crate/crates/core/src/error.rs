use thiserror::Error;

/// Errors surfaced by the classification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A malformed input line, reported with its 1-based line number.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty corpus: no usable records")]
    EmptyCorpus,

    /// Engagement filtering removed every user or every hashtag.
    #[error(
        "engagement filter removed every {kind} \
         ({hashtags_removed} hashtags and {users_removed} users dropped)"
    )]
    EmptyAfterFilter {
        kind: &'static str,
        hashtags_removed: usize,
        users_removed: usize,
    },

    /// A seed hashtag is not present in the (filtered) corpus.
    #[error("seed hashtag {0:?} is not present in the filtered corpus")]
    MissingSeed(String),

    /// Windowed runs require a timestamp on every record.
    #[error("record by user {user:?} has no timestamp; windowed runs require one")]
    MissingTimestamp { user: String },

    /// The requested operation needs post-level records but only
    /// pre-aggregated counts were supplied.
    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("golden set is empty: {0}")]
    EmptyGoldenSet(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
