use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid box dimensions L={l}, M={m} (need L >= 0, M >= 1)")]
    InvalidDimensions { l: i64, m: i64 },

    #[error("window does not contain the plaquette set with one cell of margin")]
    WindowTooSmall,

    #[error("vertex set is empty")]
    EmptyVertexSet,

    #[error("vertex set is not connected")]
    DisconnectedVertexSet,

    #[error("vertex set is not a connected component of the complement graph")]
    NotAComponent,

    #[error("model has {edges} edges, enumeration cap is {cap}")]
    CapExceeded { edges: usize, cap: usize },

    #[error("no configuration satisfies the label constraint")]
    EmptyConditioning,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("configuration has an open crossing between the upper and lower boundary")]
    CrossingPresent,

    #[error("inadmissible wall family: {0}")]
    Inadmissible(String),

    #[error("invalid interface: {0}")]
    InvalidInterface(String),

    #[error("invalid checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
