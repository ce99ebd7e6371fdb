use thiserror::Error;

use crate::graph::{Edge, Vertex};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),

    #[error("duplicate edge {0}")]
    DuplicateEdge(Edge),

    #[error("edge {0} is not in the graph")]
    MissingEdge(Edge),

    #[error("input is not a tree: {0}")]
    NotATree(String),

    #[error("component with lowest vertex {lowest} has cyclomatic number {cyclomatic} > cap {cap}")]
    ComponentTooCyclic {
        lowest: Vertex,
        cyclomatic: usize,
        cap: usize,
    },

    #[error("component with lowest vertex {lowest} has no proper colouring")]
    Uncolourable { lowest: Vertex },

    #[error("colour {colour} out of range for palette of size {k}")]
    ColourOutOfRange { colour: u32, k: usize },

    #[error("run {index}: {source}")]
    Run {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed document: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
