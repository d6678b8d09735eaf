use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("point set must contain at least one point")]
    EmptyPointSet,

    #[error("points coincide, Vandermonde determinant vanishes")]
    DegeneratePoints,

    #[error("tableau enumeration capped at weight {cap}, got {weight}")]
    TableauTooLarge { weight: usize, cap: usize },

    #[error("matrix dimension {0} is odd")]
    OddDimension(usize),

    #[error("matrix is not skew-symmetric at ({0}, {1})")]
    NotSkew(usize, usize),

    #[error("index error: {0}")]
    IndexError(String),

    #[error("eigenvalue routine failed: {0}")]
    ConvergenceFailure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
