use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{e} is not a Hall divisor of {n}")]
    NotHallDivisor { n: u64, e: u64 },
    #[error("level {0} is not square-free")]
    NotSquareFree(u64),
    #[error("character parity does not match weight {0}")]
    ParityMismatch(i64),
    #[error("weight {0} is not supported")]
    UnsupportedWeight(i64),
    #[error("no table entry for gamma_{order}({k}) with sign {sign}")]
    InvalidCombination { order: u32, k: i64, sign: String },
    #[error("internal limit reached: {0}")]
    InternalLimit(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
