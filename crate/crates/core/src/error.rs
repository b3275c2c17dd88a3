use thiserror::Error;

use crate::lattice::EnumerationError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no vertices")]
    Empty,
    #[error("edge {edge} has nonpositive length {length}")]
    NonpositiveLength { edge: String, length: String },
    #[error("edge {edge} has infinite length; infinite leaves are not supported")]
    InfiniteLength { edge: String },
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("offset {offset} is outside edge {edge}")]
    OffsetOutOfRange { edge: String, offset: String },
    #[error("edge set is not a spanning tree")]
    NotASpanningTree,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("malformed PL function: {0}")]
    MalformedFunction(String),
    #[error("source set is empty")]
    EmptySource,
    #[error("theta characteristic class must be nontrivial")]
    TrivialGamma,
    #[error("genus {genus} exceeds the enumeration cap {cap}")]
    GenusTooLarge { genus: usize, cap: usize },
    #[error("unit model needs {required} segments (scale {scale}), cap is {cap}")]
    UnitModelTooLarge { required: String, scale: String, cap: usize },
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
