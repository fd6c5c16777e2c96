use thiserror::Error;

/// Errors raised by graph construction, evaluation, optimization and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid node id {0:?}")]
    InvalidId(String),
    #[error("node {0:?} already exists")]
    DuplicateNode(String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("unknown parent {parent:?} of node {node:?}")]
    UnknownParent { node: String, parent: String },
    #[error("adding {node:?} would create a cycle")]
    Cycle { node: String },
    #[error("{0}")]
    CoeffArity(String),
    #[error("node {node:?} is still referenced by {child:?}")]
    StillReferenced { node: String, child: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("division by zero at point {index} (value {value})")]
    ZeroDivision { index: usize, value: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
