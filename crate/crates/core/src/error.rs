use thiserror::Error;

/// Failures raised while building or combining distributions and channels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbError {
    #[error("distribution has no entries")]
    Empty,
    #[error("entry {index} is not a finite number")]
    NonFinite { index: usize },
    #[error("entry {index} is negative ({value})")]
    Negative { index: usize, value: f64 },
    #[error("entries sum to {sum}, outside 1 \u{b1} {tolerance}")]
    NotNormalized { sum: f64, tolerance: f64 },
    #[error("row {row}: {source}")]
    Row {
        row: usize,
        #[source]
        source: Box<ProbError>,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{cells} joint cells exceed the configured cap of {cap}")]
    SizeCap { cells: u128, cap: usize },
    #[error("index {index} out of range for alphabet of size {size}")]
    OutOfRange { index: usize, size: usize },
    #[error("at least one factor is required")]
    EmptyList,
}

/// Model-level failures: codes, families, state sequences.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("a code needs at least one message")]
    NoMessages,
    #[error("decoder has {found} entries, expected one per output ({expected})")]
    DecoderLength { expected: usize, found: usize },
    #[error("decoder maps output {output} to message {message}, but only {count} messages exist")]
    DecoderRange {
        output: usize,
        message: usize,
        count: usize,
    },
    #[error("family needs at least one state")]
    NoStates,
    #[error("state {state}: {what} alphabet sizes disagree with state 0 ({expected:?} vs {found:?})")]
    InconsistentState {
        state: usize,
        what: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("state index {index} out of range for {count} states")]
    StateOutOfRange { index: usize, count: usize },
    #[error("block length must be at least 1")]
    ZeroBlockLength,
    #[error("a channel list must be non-empty")]
    EmptyChannelList,
    #[error("{0}")]
    Invalid(String),
}

impl ModelError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        ModelError::Invalid(msg.into())
    }
}
