use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid action counts: {0}")]
    InvalidCounts(String),

    #[error("profile lies outside the strategy polytope: {0}")]
    OutOfPolytope(String),

    #[error("invalid mixed strategy: {0}")]
    InvalidSimplex(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("game admits no exact potential (max violation {max_violation:e})")]
    NotPotentialGame { max_violation: f64 },

    #[error("game too large for support enumeration ({profiles} joint profiles, limit {limit})")]
    TooLarge { profiles: usize, limit: usize },

    #[error("profile is not a Nash equilibrium (max deviation gain {gain:e})")]
    NotAnEquilibrium { gain: f64 },

    #[error("profile is not a strict pure Nash equilibrium")]
    NotStrictPure,

    #[error("best response at segment start is not a single vertex")]
    DegenerateSegment,

    #[error("trajectory did not converge to a pure equilibrium")]
    NotConverged,

    #[error("equilibrium list is empty")]
    EmptyEquilibriumList,

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}
