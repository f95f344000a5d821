use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input must be positive")]
    ZeroInput,

    #[error("{0} is not a discriminant (must be 0 or 1 mod 4)")]
    NotDiscriminant(i64),

    #[error("discriminant {0} is not negative")]
    NotNegative(i64),

    #[error("discriminant {0} is not fundamental (non-maximal order)")]
    NotFundamental(i64),

    #[error("N = {n} is out of scope: {reason}")]
    OutOfScope { n: u64, reason: &'static str },

    #[error("form ({a}, {b}, {c}) is not a primitive positive definite form")]
    InvalidForm { a: i64, b: i64, c: i64 },

    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),

    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("series must have at least one coefficient")]
    EmptySeries,

    #[error("leading coefficient is not invertible")]
    NotInvertible,

    #[error("({0}, {1}) is not a genus splitting of the discriminant")]
    InvalidSplitting(i64, i64),

    #[error("character does not belong to this class group")]
    GroupMismatch,

    #[error("expected {expected} distinct characters, got {got}")]
    IncompleteCharacters { expected: usize, got: usize },

    #[error("grid is degenerate: {0}")]
    DegenerateGrid(&'static str),

    #[error("grid point {point} exceeds series length {len}")]
    GridExceedsSeries { point: u64, len: usize },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("coefficient cache: {0}")]
    Cache(String),
}
