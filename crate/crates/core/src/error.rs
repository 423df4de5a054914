use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // graph construction
    #[error("vertex index {index} out of range for graph with {num_vertices} vertices")]
    VertexOutOfRange { index: usize, num_vertices: usize },
    #[error("vertex {vertex} has invalid label {label} (labels must be positive integers)")]
    InvalidLabel { vertex: usize, label: i64 },
    #[error("self-loop on vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset has {graphs} graphs but {classes} class labels")]
    ClassCountMismatch { graphs: usize, classes: usize },

    // parsing
    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("inconsistent line counts: {0}")]
    InconsistentCounts(String),
    #[error("edge ({u}, {v}) connects graph {graph_u} and graph {graph_v}")]
    CrossGraphEdge {
        u: usize,
        v: usize,
        graph_u: usize,
        graph_v: usize,
    },
    #[error("edge probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid generator parameter: {0}")]
    InvalidGenerator(String),

    // trees and patterns
    #[error("root {root} invalid for graph with {num_vertices} vertices")]
    InvalidRoot { root: usize, num_vertices: usize },
    #[error("path pattern must be non-empty")]
    EmptyPattern,
    #[error("signature of depth {found} mixed into interner of depth {expected}")]
    MixedDepths { expected: usize, found: usize },
    #[error("signature of vertex {vertex} is absent from the interner")]
    UnknownSignature { vertex: usize },
    #[error("path repeats vertex {vertex}")]
    RepeatedVertex { vertex: usize },

    // kernels
    #[error("feature maps come from different configurations ({0})")]
    ProvenanceMismatch(String),
    #[error("integer overflow while accumulating kernel values")]
    Overflow,
    #[error("non-positive diagonal entry {value} for graph {index}")]
    NonPositiveDiagonal { index: usize, value: f64 },
    #[error("graph {index} has no vertices")]
    EmptyGraph { index: usize },
    #[error("oracle limited to {max} vertices, got {found}")]
    OracleSizeExceeded { max: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    // evaluation
    #[error("kernel entry ({row}, {col}) is not finite")]
    NonFiniteKernel { row: usize, col: usize },
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("training labels must be +1 or -1, got {0}")]
    InvalidSvmLabel(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not enough samples: {0}")]
    InsufficientSamples(String),
}

impl Error {
    /// True for failures caused by unreadable or malformed input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::VertexOutOfRange { .. }
                | Error::InvalidLabel { .. }
                | Error::SelfLoop { .. }
                | Error::EmptyDataset
                | Error::ClassCountMismatch { .. }
                | Error::MissingFile(_)
                | Error::Io { .. }
                | Error::Parse { .. }
                | Error::InconsistentCounts(_)
                | Error::CrossGraphEdge { .. }
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
