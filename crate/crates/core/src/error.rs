use crate::subset::Subset;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{what}: size {got} exceeds cap {cap}")]
    CapExceeded { what: &'static str, got: usize, cap: usize },
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid subset {subset} for ground set of size {n}")]
    InvalidSubset { subset: Subset, n: usize },
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("polynomial is not 2-homogeneous")]
    NotQuadratic,
    #[error("polynomial has a constant term")]
    ConstantTerm,
    #[error("negative input: {0}")]
    NegativeInput(String),
    #[error("not a matroid: {0}")]
    NotAMatroid(String),
    #[error("no witness for tau = {0}")]
    MissingTauWitness(Subset),
    #[error("d = {d} exceeds matroid rank {rank}")]
    DExceedsRank { d: usize, rank: usize },
    #[error("conditioning set overlaps the target variables")]
    Overlap,
    #[error("negative coverage weight {weight} on {subset}")]
    NotCoverage { subset: Subset, weight: String },
    #[error("down-up step stuck at {0}")]
    StuckState(Subset),
    #[error("total variation did not drop below epsilon within {0} steps")]
    NoConvergence(usize),
    #[error("detailed balance violated between states {0} and {1}")]
    BalanceViolation(Subset, Subset),
    #[error("coverage reconstruction failed at {0}")]
    ReconstructionFailure(Subset),
    #[error("certificate verification failed: {0}")]
    VerificationFailure(String),
    #[error("state {0} is not in the walk support")]
    NotInSupport(Subset),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
