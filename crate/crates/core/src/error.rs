use thiserror::Error;

use crate::hadamard::PartialHadamardReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("expected a complement of dimension {expected}, found {found}")]
    Rank { expected: usize, found: usize },

    #[error("enumeration needs {required} candidates, budget is {limit}")]
    Budget { required: u128, limit: u128 },

    #[error("non-finite value at {0}")]
    NonFinite(String),

    #[error("not a partial Hadamard matrix (modulus deviation {:.3e}, gram deviation {:.3e})",
        .0.max_modulus_deviation, .0.max_gram_deviation)]
    NotPartialHadamard(Box<PartialHadamardReport>),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}
