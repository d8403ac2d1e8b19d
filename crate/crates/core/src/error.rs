use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a word of length {expected}, got length {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("illegal character {0:?} in binary word")]
    IllegalChar(char),

    #[error("dimension {0} out of range 1..={max}", max = crate::MAX_DIM)]
    Dimension(u32),

    #[error("position {pos} out of range 1..={n}")]
    Position { pos: u32, n: u32 },

    #[error("{0} and {1} are not adjacent in the hypercube")]
    NotAdjacent(String, String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u32, u32),

    #[error("invalid cycle: {0}")]
    InvalidCycle(String),

    #[error("cycle length {0} must be even and at least 4")]
    CycleLength(usize),

    #[error("cycle does not alternate between two consecutive layers")]
    NotLayerAlternating,

    #[error("guard exceeded: {0}")]
    Guard(String),

    #[error("incomplete coloring: {missing} of {total} edges have no color")]
    IncompleteColoring { missing: usize, total: usize },

    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },

    #[error("premise not satisfied: {0}")]
    Premise(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn malformed(line: usize, msg: impl Into<String>) -> Self {
        Error::Malformed { line, msg: msg.into() }
    }
}
