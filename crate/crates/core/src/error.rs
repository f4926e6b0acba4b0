use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("distance matrix is not square: {rows} rows, row {row} has {cols} entries")]
    NonSquare { rows: usize, row: usize, cols: usize },
    #[error("asymmetric input: d[{p}][{q}] = {forward} but d[{q}][{p}] = {backward}")]
    AsymmetricInput { p: usize, q: usize, forward: f64, backward: f64 },
    #[error("negative distance d[{p}][{q}] = {value}")]
    NegativeDistance { p: usize, q: usize, value: f64 },
    #[error("nonzero diagonal entry d[{p}][{p}] = {value}")]
    NonzeroDiagonal { p: usize, value: f64 },
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("graph has a self-loop at node {0}")]
    SelfLoop(usize),
    #[error("point vectors have mismatched dimensions: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("exact doubling constant limited to 24 points, got {0}")]
    TooLargeForExact(usize),
    #[error("invalid radii: eps = {eps} must satisfy 0 < eps <= r = {r}")]
    InvalidRadii { r: f64, eps: f64 },
    #[error("degenerate subset: all points coincide")]
    DegenerateSubset,
    #[error("unknown point index {0}")]
    UnknownPoint(usize),
    #[error("election has no embedding")]
    NoEmbedding,
    #[error("gamma = {0} is outside [0, 1)")]
    GammaOutOfRange(f64),
    #[error("candidates {0} and {1} are coincident")]
    CoincidentCandidates(usize, usize),
    #[error("parallel-universe STV limited to 20 candidates, got {0}")]
    TooManyCandidates(usize),
    #[error("malformed elimination sequence: {0}")]
    MalformedSequence(String),
    #[error("no candidate admits a perfect matching; this should be impossible")]
    InternalInvariantBroken,
    #[error("alpha = {0} is outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("worst-case LP requires two distinct candidates")]
    SameCandidate,
    #[error("LP solver failed: {0}")]
    SolverFailure(String),
    #[error("LP model is unbounded; the normalization constraint is missing")]
    UnboundedModel,
    #[error("voter count must be even and positive, got {0}")]
    OddN(usize),
    #[error("eps = {0} must lie in (0, 1)")]
    EpsOutOfRange(f64),
    #[error("delta = {0} must be positive")]
    NonpositiveDelta(f64),
    #[error("tree height limited to 4, got {0}")]
    HeightTooLarge(usize),
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("unknown theorem id: {0}")]
    UnknownTheorem(String),
    #[error("invalid ranking: {0}")]
    InvalidRanking(String),
    #[error("rho = {0} must be >= 1")]
    RhoOutOfRange(f64),
    #[error("invalid file: {0}")]
    InvalidFile(String),
}
