use thiserror::Error;

/// Errors raised by the analysis routines.
///
/// Variants fall into three groups, which the CLI maps onto exit codes:
/// invalid mathematical input, range limits, and internal invariant breaches.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid connection set: {0}")]
    InvalidConnectionSet(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("modulus must be positive")]
    ZeroModulus,

    #[error("order {k} does not divide p - 1 = {}", p - 1)]
    OrderDoesNotDivide { p: u64, k: u64 },

    #[error("not a subgroup of the units mod {modulus}: {reason}")]
    NotASubgroup { modulus: u64, reason: String },

    #[error("subgroup does not contain -1 mod {0}")]
    NotEvenSubgroup(u64),

    #[error("2 is not invertible mod {0}")]
    TwoNotInvertible(u64),

    #[error("expected an even order k >= 2, got {0}")]
    OddOrder(u64),

    #[error("({a}, {b}, {c}, {d}) does not satisfy a - b = 2(c - d)")]
    NotASolution { a: String, b: String, c: String, d: String },

    #[error("cyclotomic order mismatch: {0} vs {1}")]
    OrderMismatch(u64, u64),

    #[error("size mismatch: expected {expected}, got {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),

    #[error("cannot shrink a {from}x{from} witness to {to}x{to}")]
    CannotShrink { from: usize, to: usize },

    #[error("{what} = {value} exceeds the configured bound {bound}")]
    RangeExceeded { what: &'static str, value: u64, bound: u64 },

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("eigenvalue clusters closer than 10x tolerance ({distance:e} vs tolerance {tolerance:e})")]
    ToleranceAmbiguity { distance: f64, tolerance: f64 },

    #[error(
        "bound violated: order-{k} subgroup mod {p} is not 2-maximal although p > 6^phi(k); \
         genuine solution {quadruple:?}"
    )]
    BoundFalsified { k: u64, p: u64, quadruple: [u64; 4] },
}

impl Error {
    /// Short machine-readable tag, used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidConnectionSet(_) => "InvalidConnectionSet",
            Error::NotPrime(_) => "NotPrime",
            Error::ZeroModulus => "ZeroModulus",
            Error::OrderDoesNotDivide { .. } => "OrderDoesNotDivide",
            Error::NotASubgroup { .. } => "NotASubgroup",
            Error::NotEvenSubgroup(_) => "NotEvenSubgroup",
            Error::TwoNotInvertible(_) => "TwoNotInvertible",
            Error::OddOrder(_) => "OddOrder",
            Error::NotASolution { .. } => "NotASolution",
            Error::OrderMismatch(..) => "OrderMismatch",
            Error::SizeMismatch { .. } => "SizeMismatch",
            Error::InvalidPermutation(_) => "InvalidPermutation",
            Error::CannotShrink { .. } => "CannotShrink",
            Error::RangeExceeded { .. } => "RangeExceeded",
            Error::InvalidTolerance(_) => "InvalidTolerance",
            Error::ToleranceAmbiguity { .. } => "ToleranceAmbiguity",
            Error::BoundFalsified { .. } => "BoundFalsified",
        }
    }

    /// True for errors that signal a broken mathematical invariant rather
    /// than bad input.
    pub fn is_invariant_breach(&self) -> bool {
        matches!(self, Error::BoundFalsified { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
