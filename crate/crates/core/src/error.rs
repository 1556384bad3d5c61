use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size mismatch: {0} vs {1} points")]
    SizeMismatch(usize, usize),
    #[error("point {point} out of range 0..{n}")]
    PointOutOfRange { point: usize, n: usize },
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("empty point set")]
    EmptySet,
    #[error("partition does not refine the formula's agreement partition")]
    NotAgreeing,
    #[error("point set is not a single cluster")]
    NotACluster,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{what} of {got} exceeds cap {cap}")]
    CapExceeded { what: &'static str, got: usize, cap: usize },
    #[error("formula is not satisfied at any point of the model")]
    Unsatisfiable,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
