use num_rational::BigRational;
use thiserror::Error;

/// Crate-wide error type. Every fallible operation reports one of these
/// variants; none of them panic on malformed mathematical input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operation requires an infinite (eventually periodic) continued fraction")]
    RequiresInfiniteCf,

    #[error("continued fraction digits must be positive integers, got {0}")]
    InvalidDigit(i64),

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(BigRational),

    #[error("word must be non-empty")]
    EmptyWord,

    #[error("word contains symbol {symbol} outside alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },

    #[error("quadratic form is degenerate or definite: discriminant {disc} is not positive")]
    NonIndefiniteForm { disc: BigRational },

    #[error("quadratic form vanishes at lattice point ({x}, {y}); truncated minimum is zero")]
    FormZeroMinimum { x: i64, y: i64 },

    #[error("search radius must be at least 1")]
    InvalidRadius,

    #[error("logarithm requires a strictly positive argument, got lower endpoint {0}")]
    NonpositiveLog(BigRational),

    #[error("alphabet must be non-empty")]
    EmptyAlphabet,

    #[error("symbol {0} occurs in no allowed transition")]
    UnusedSymbol(usize),

    #[error("word {0:?} is not admissible for the given transition structure")]
    NotAdmissible(Vec<usize>),

    #[error("{what} budget exceeded: needed {needed}, budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u64,
        budget: u64,
    },

    #[error("invalid Cantor set data: {0}")]
    InvalidCantorData(String),

    #[error("invalid horseshoe data: {0}")]
    InvalidHorseshoe(String),

    #[error("sum cover is empty")]
    EmptyCover,

    #[error("target interval shrunk by slack is empty: [{lo}, {hi}]")]
    EmptyTarget {
        lo: Box<BigRational>,
        hi: Box<BigRational>,
    },

    #[error("density {ones}/{total} is below the required threshold {num}/{den}")]
    DensityBelowThreshold {
        ones: u64,
        total: u64,
        num: u64,
        den: u64,
    },

    #[error("matrix dimension {n} exceeds the supported budget {max}")]
    MatrixTooLarge { n: usize, max: usize },

    #[error("matrix power {k} exceeds the supported budget {max}")]
    PowerTooLarge { k: u32, max: u32 },

    #[error("exponent alpha must lie in the open interval (1/4, 1/2), got {0}")]
    AlphaOutOfRange(BigRational),

    #[error("injection domain requires N >= 16, got {0}")]
    DomainTooSmall(u64),

    #[error("prohibition instance mismatch: {0}")]
    InvalidProhibition(String),

    #[error("invalid interference relation: {0}")]
    InvalidInterference(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
