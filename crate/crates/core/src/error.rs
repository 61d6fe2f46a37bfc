use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("edge joins vertex {0} to itself")]
    LoopEdge(String),
    #[error("vertex {vertex} has self-intersection {value}, expected <= -1")]
    NonNegativeSelfIntersection { vertex: String, value: i64 },
    #[error("intersection matrix is not negative definite (leading principal minor {minor_index} of the negated matrix is not positive)")]
    NotNegativeDefinite { minor_index: usize },
    #[error("duplicate vertex id {0}")]
    DuplicateVertexId(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("no edge between {0} and {1}")]
    NoSuchEdge(String, String),
    #[error("vertex id {0} already in use")]
    IdCollision(String),
    #[error("singular intersection matrix")]
    SingularMatrix,
    #[error("branch has no positive intersection number")]
    EmptyBranch,
    #[error("crucial inequality violated: {0}")]
    InequalityViolated(String),
    #[error("degenerate spherical triangle")]
    DegenerateTriangle,
    #[error("empty family")]
    EmptyFamily,
    #[error("hull leaf {0} is not in the label set")]
    LeafNotInF(String),
    #[error("label sets differ")]
    LabelSetMismatch,
    #[error("family is not in injective-resolution form: {0}")]
    NotInjectiveResolution(String),
    #[error("root index is not in the family")]
    RootNotInFamily,
    #[error("metric is not tree-like: {0}")]
    NotTreeLike(String),
    #[error("labels {0} and {1} are at distance zero")]
    CoincidentLabels(String, String),
    #[error("metric is not ultrametric on ({0}, {1}, {2})")]
    NotUltrametric(String, String, String),
    #[error("invalid valuation: {0}")]
    InvalidValuation(String),
    #[error("valuations {0} and {1} coincide")]
    DuplicateValuation(usize, usize),
    #[error("graph is arborescent")]
    GraphIsArborescent,
    #[error("internal verification failed: {0}")]
    InternalVerificationFailed(String),
}

impl Error {
    /// True for errors that can only come from a bug, never from bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::InequalityViolated(_) | Error::InternalVerificationFailed(_) | Error::SingularMatrix)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
