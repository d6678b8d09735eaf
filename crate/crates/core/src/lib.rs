//! Schur-function averages over the real Ginibre ensemble.
//!
//! Three routes compute the same numbers and are meant to check each other:
//!
//! * [`ginibre::schur_average_closed`]: the division-free product formula,
//!   exact over big integers.
//! * [`ginibre::schur_average_pfaffian`]: a ratio of Pfaffians of
//!   submatrices of the staircase matrix `ε⁻¹`, with the `a_k`
//!   prefactors carried symbolically.
//! * [`montecarlo`]: direct sampling of Gaussian matrices and evaluation
//!   of symmetric functions at their eigenvalues.
//!
//! The supporting modules ([`partitions`], [`symfunc`], [`pfaffian`]) are
//! usable on their own.

pub mod error;
pub mod ginibre;
mod linalg;
pub mod montecarlo;
pub mod partitions;
pub mod pfaffian;
pub mod report;
pub mod scalar;
pub mod symfunc;

pub use error::{Error, Result};
pub use partitions::Partition;
pub use scalar::{ExactScalar, Scalar};
