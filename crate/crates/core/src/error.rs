use thiserror::Error;

use crate::model::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("torus size {n} is too small, need n >= {min}")]
    SizeTooSmall { n: u32, min: u32 },

    #[error("torus size {0} is too large, n^2 must fit in a 32-bit vertex id")]
    SizeTooLarge(u32),

    #[error("unsupported torus size {0} for labeling, need n >= 5")]
    UnsupportedSize(u32),

    #[error("ring index {i} out of range for n = {n}, expected 1..={n}")]
    RingOutOfRange { n: u32, i: u32 },

    #[error("vertex {vertex} out of range for {count} vertices")]
    InvalidVertex { vertex: VertexId, count: usize },

    #[error("invalid cycle quadruple: {0}")]
    InvalidQuadruple(&'static str),

    #[error("invalid edge {u}-{v}: {reason}")]
    InvalidEdge {
        u: VertexId,
        v: VertexId,
        reason: &'static str,
    },

    #[error("no origin found after {0} attempts")]
    NoOrigin(u64),

    #[error("reference system at {0} is not a lattice cross")]
    MalformedReference(VertexId),

    #[error("unlabelable cross at vertex {0}")]
    UnlabelableCross(VertexId),

    #[error("no labeled vertex pairs to sample")]
    NoLabeledPairs,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
