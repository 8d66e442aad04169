use thiserror::Error;

use crate::apfree::ApWitness;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("base must be at least 3, got {0}")]
    InvalidBase(u64),

    #[error("digit {digit} is out of range for base {base}")]
    InvalidDigit { digit: u64, base: u64 },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("element {element} lies outside [0, {bound})")]
    OutOfRange { element: u64, bound: u64 },

    #[error("seed is not p-free: {0}")]
    SeedNotFree(ApWitness),

    #[error("seed element {element} exceeds the generation limit {limit}")]
    SeedAboveLimit { element: u64, limit: u64 },

    #[error("seed set is empty")]
    EmptySeed,

    #[error("generation limit {have} is below the required {need}")]
    InsufficientLimit { have: u64, need: u64 },

    #[error("{n} is not in A_{p}")]
    NotInAp { n: u64, p: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sequence has {have} terms, at least {need} are required")]
    TooFewTerms { have: usize, need: usize },

    #[error("construction invariant violated: {0}")]
    Construction(String),
}
