use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("capacity exceeded while computing {what}: limit {limit}")]
    Capacity { what: &'static str, limit: usize },

    #[error("malformed table: {0}")]
    MalformedTable(String),

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("point {point} out of range for order {order}")]
    OutOfRange { point: usize, order: usize },

    #[error("relation is not a congruence")]
    NotACongruence,

    #[error("term of arity {arity} applied to {given} arguments")]
    ArityMismatch { arity: usize, given: usize },

    #[error("containment violated: {0}")]
    ContainmentViolated(&'static str),

    #[error("endomorphism is not an automorphism")]
    NotAutomorphism,

    #[error("ill-defined endomorphism: {0}")]
    IllDefinedEndomorphism(String),

    #[error("subgroup is not invariant: {0}")]
    InvarianceViolation(&'static str),

    #[error("join of central congruences does not centralize")]
    JoinFailure,

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}
