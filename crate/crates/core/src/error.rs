use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("edge {edge} ({vertex}, {vertex}) is a self-loop")]
    LoopEdge { edge: usize, vertex: usize },
    #[error("edge {edge} ({tail}, {head}) duplicates or reverses edge {first}")]
    TwoCycleOrParallelEdge {
        edge: usize,
        tail: usize,
        head: usize,
        first: usize,
    },
    #[error("graph is disconnected: vertex {vertex} is unreachable from vertex 0")]
    Disconnected { vertex: usize },
    #[error("edge {edge} references vertex {vertex}, but the graph has {n} vertices")]
    VertexOutOfRange {
        edge: usize,
        vertex: usize,
        n: usize,
    },
    #[error("domain mismatch: expected length {expected}, found {found}")]
    DomainMismatch { expected: usize, found: usize },
    #[error("walk step ({from}, {to}) is not an edge of the graph")]
    NotAnEdge { from: usize, to: usize },
    #[error("walk uses edge {edge} more than once")]
    RepeatedEdge { edge: usize },
    #[error("walk must be closed and contain at least one step")]
    OpenWalk,
    #[error("cycle entry for edge {edge} has sign {sign}, expected +1 or -1")]
    InvalidSign { edge: usize, sign: f64 },
    #[error(
        "right-hand side violates the compatibility condition (1, f) = 0: sum of f is {sum:e}"
    )]
    IncompatibleRhs { sum: f64 },
    #[error("edge {edge} belongs to the spanning tree")]
    EdgeInTree { edge: usize },
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    RootOutOfRange { vertex: usize, n: usize },
    #[error("cycle has no entries")]
    EmptyCycle,
    #[error("cycle basis is empty")]
    EmptyBasis,
    #[error("edge {edge} out of range for {m} edges")]
    EdgeOutOfRange { edge: usize, m: usize },
    #[error("problem size {size} exceeds the dense limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("cycles do not form a basis of the cycle space: {0}")]
    NotABasis(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}
