use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by the numerical routines.
///
/// Variants fall into three families that callers (the CLI in particular)
/// map onto distinct exit codes: malformed input, numerical guards that
/// refuse to produce an uncertified answer, and internal invariant breaches.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("grid with {points} points per axis is too coarse: {reason} (need at least {required})")]
    GridTooSmall {
        points: usize,
        required: usize,
        reason: &'static str,
    },

    #[error("grid of {points}^{dim} samples exceeds the supported size")]
    GridTooLarge { points: usize, dim: usize },

    #[error("unsupported L_p exponent {0}; supported exponents are 1, 2 and 4")]
    UnsupportedExponent(u32),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("sets are not strictly nested at block {index}")]
    NotNested { index: usize },

    #[error("sign sequence has {available} entries but {required} are required")]
    SignsTooShort { required: usize, available: usize },

    #[error("exhaustive search over N = {n} exceeds the limit N <= {limit}; use annealing instead")]
    SearchTooLarge { n: usize, limit: usize },

    #[error("quadrature grid of {points} points per unit length is coarser than a box of width {width}")]
    QuadratureTooCoarse { points: usize, width: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for errors that refuse to return an uncertified numerical result.
    pub fn is_numeric_guard(&self) -> bool {
        matches!(
            self,
            Error::GridTooSmall { .. }
                | Error::GridTooLarge { .. }
                | Error::SearchTooLarge { .. }
                | Error::SignsTooShort { .. }
                | Error::QuadratureTooCoarse { .. }
        )
    }

    pub fn is_invariant_breach(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}
