use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("problem has no users")]
    NoUsers,

    #[error("demand of user {index} is {value}; demands must be finite and non-negative")]
    InvalidDemand { index: usize, value: f64 },

    #[error("estate is {0}; it must be finite and non-negative")]
    InvalidEstate(f64),

    #[error("every demand is zero")]
    ZeroTotalDemand,

    /// Total demand is below the estate, so the pair is not a bankruptcy problem.
    #[error("not a bankruptcy problem: total demand {total} is below estate {estate}")]
    NotBankrupt { total: f64, estate: f64 },

    #[error("user index {index} is out of range for {users} users")]
    InvalidCoalition { index: usize, users: usize },

    #[error("{what} supports at most {limit} users, got {users}")]
    TooManyUsers { what: &'static str, limit: usize, users: usize },

    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("weight of user {index} is {value}; weights must be finite and positive")]
    InvalidWeight { index: usize, value: f64 },

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    #[error("{0} is undefined for an all-zero rate vector")]
    UndefinedIndex(&'static str),

    #[error("{0}")]
    Domain(String),

    #[error("unknown rule `{0}`")]
    UnknownRule(String),

    #[error("invalid demand distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
}
