use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),

    #[error("asymmetric preference listing: {lister} lists {listed} but {listed} does not list {lister}")]
    AsymmetricPreference { lister: String, listed: String },

    #[error("capacity of {name} is {capacity}, expected a value in 1..={degree}")]
    CapacityOutOfRange {
        name: String,
        capacity: i64,
        degree: usize,
    },

    #[error("duplicate vertex name {0:?}")]
    DuplicateVertex(String),

    #[error("{vertex} lists {neighbor} more than once")]
    DuplicatePreference { vertex: String, neighbor: String },

    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),

    #[error("invalid cost: {0}")]
    InvalidCost(String),

    #[error("edge ({agent}, {job}) is not in the instance")]
    EdgeNotFound { agent: String, job: String },

    #[error("edge id {0} is out of range")]
    UnknownEdge(usize),

    #[error("edge ({agent}, {job}) appears more than once")]
    DuplicateEdge { agent: String, job: String },

    #[error("{0} is matched beyond its capacity")]
    CapacityExceeded(String),

    #[error("matching is not perfect: {0}")]
    NotPerfect(String),

    #[error("{candidate} is not a neighbor of {vertex}")]
    NotNeighbor { vertex: String, candidate: String },

    #[error("instance admits no perfect matching: {0}")]
    Infeasible(String),

    #[error("enumeration exceeded the limit of {0} perfect matchings")]
    EnumerationLimit(u64),

    #[error("no perfect-matchable instance found after {0} attempts")]
    GenerationFailed(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Syntax(err.to_string())
    }
}
