use crate::graph::{EdgeId, VertexId};

/// Errors reported by graph operations, the counting engine, and parsers.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("edge {0} is a self-loop, which is not allowed here")]
    SelfLoop(EdgeId),
    #[error("graph is not simple: {0}")]
    NotSimple(String),
    #[error("vertices {0} and {1} must be distinct")]
    VerticesNotDistinct(VertexId, VertexId),
    #[error("no edge joins {0} and {1}")]
    NoSuchEdge(VertexId, VertexId),
    #[error("the two sides of a bigraph must share one edge set; {0}")]
    BiedgeMismatch(String),
    #[error("graph is not Laman: {0}")]
    NotLaman(String),
    #[error("bigraph is not pseudo-Laman (dim {dim_g} + dim {dim_h} != {biedges} + 1)")]
    NotPseudoLaman {
        dim_g: usize,
        dim_h: usize,
        biedges: usize,
    },
    #[error("arithmetic overflow while accumulating a Laman number")]
    Overflow,
    #[error("enumeration for n = {requested} exceeds the configured cap {cap}")]
    AboveCap { requested: u32, cap: u32 },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
