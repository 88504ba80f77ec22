use thiserror::Error;

/// Errors raised by the geometry engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported extension degree n = {0} (supported: 3..=8)")]
    UnsupportedDegree(u32),

    #[error("invalid arc exponent h = {h} for n = {n}: need 1 <= h <= n-1 and gcd(h, n) = 1")]
    InvalidExponent { n: u32, h: u32 },

    #[error("modulus {modulus:#x} is not irreducible of degree {n}")]
    ReducibleModulus { n: u32, modulus: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("not a line: {0}")]
    NotALine(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("table {table} unavailable: {reason}")]
    TableUnavailable { table: u8, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
