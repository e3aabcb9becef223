use thiserror::Error;

use crate::graph::VertexId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("invalid minor model: {0}")]
    InvalidModel(String),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("invalid decoration spec: {0}")]
    InvalidDecoration(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{stage}: resource guard exceeded ({detail})")]
    Resource { stage: &'static str, detail: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn resource(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::Resource {
            stage,
            detail: detail.into(),
        }
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}
