use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("polynomial {0} is reducible over the rationals")]
    Reducible(String),
    #[error("base must be greater than one ({0})")]
    NotGreaterThanOne(String),
    #[error("exact division failed: {0}")]
    DivisionFailed(String),
    #[error("precision exhausted at {bits} bits: {what}")]
    PrecisionExhausted { bits: u32, what: String },
    #[error("series with zero constant term is not a unit")]
    NotAUnit,
    #[error("expansion has only {available} digits, {needed} requested")]
    InsufficientDigits { available: usize, needed: usize },
    #[error("expansion of 1 is not resolved as finite or eventually periodic within {0} steps")]
    NotParryResolved(usize),
    #[error("germ tail not controlled at order {order}: {detail}")]
    TailNotControlled { order: usize, detail: String },
    #[error("every germ coefficient vanishes through the truncation order")]
    AllCoefficientsVanish,
    #[error("truncation too short: {0}")]
    TruncationTooShort(String),
    #[error("conjugate series collide through the truncation order")]
    ConjugatesCollide,
    #[error("rationality undecided: {0}")]
    RationalityUndecided(String),
    #[error("branch ambiguity near {0}")]
    BranchAmbiguity(String),
    #[error("period {n} exceeds the enumeration bound {bound}")]
    TooLarge { n: usize, bound: usize },
    #[error("independent constructions disagree: {0}")]
    RouteMismatch(String),
    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
