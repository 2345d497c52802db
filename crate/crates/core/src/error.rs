use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: u64 },

    #[error("graph is disconnected: vertex {unreachable} is not reachable from vertex {from}")]
    Disconnected { from: u64, unreachable: u64 },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("graph too large: {what} = {actual} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("hypercube dimension {0} outside 1..=62")]
    InvalidDimension(u32),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u32, u32),

    #[error("coordinate {coord} out of range for Q_{d}")]
    CoordinateOutOfRange { coord: u32, d: u32 },

    #[error("invalid vertex: {0}")]
    InvalidVertex(String),

    #[error("{0} is not an edge of the graph")]
    NotAnEdge(String),

    #[error("landmark set is empty")]
    EmptyLandmarks,

    #[error("duplicate landmark {0}")]
    DuplicateLandmark(usize),

    #[error("vertex {0} is not a member of the landmark set")]
    NotAMember(String),

    #[error("graph is not bipartite")]
    NotBipartite,

    /// A checked statement was falsified; carries the offending instance.
    #[error("COUNTEREXAMPLE to {statement}: {detail}")]
    Counterexample { statement: String, detail: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
