use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown triangle {0}")]
    UnknownTriangle(usize),
    #[error("cannot flip: {0}")]
    Flip(String),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("unsupported surface: {0}")]
    Unsupported(String),
    #[error("cannot mutate: {0}")]
    Mutation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("vertex sets differ")]
    VertexMismatch,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
