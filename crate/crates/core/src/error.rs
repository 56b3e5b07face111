//! Error type shared across the crate.

/// Everything that can go wrong while validating data or fitting a model.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Two containers that must agree in length (or shape) do not.
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// Fewer observations than the operation can support.
    #[error("too few observations: need at least {min}, got {got}")]
    TooFewObservations { min: usize, got: usize },

    /// A NaN or infinity where a finite number is required.
    #[error("non-finite value {value} at index {index} in {context}")]
    NonFiniteInput {
        context: &'static str,
        index: usize,
        value: f64,
    },

    /// The design column that must be an intercept is not identically one.
    #[error("design matrix must carry an all-ones intercept in column 0 (row {row} holds {value})")]
    MissingIntercept { row: usize, value: f64 },

    /// Design matrix is rank deficient beyond numerical tolerance.
    #[error("design matrix is numerically singular (reciprocal condition estimate {rcond:.3e})")]
    SingularDesign { rcond: f64 },

    /// A weight that must be strictly positive is not.
    #[error("weight {value} at index {index} must be strictly positive")]
    NonPositiveWeight { index: usize, value: f64 },

    /// A regressor column that must be strictly positive to serve as a
    /// variance driver is not.
    #[error("regressor column {column} has non-positive entry {value} at row {row}")]
    NonPositiveRegressor {
        column: usize,
        row: usize,
        value: f64,
    },

    /// A variance that must be strictly positive is not.
    #[error("variance {value} must be strictly positive")]
    NonPositiveVariance { value: f64 },

    /// Ranks are undefined because every value in the vector is identical.
    #[error("rank correlation undefined: {context} is constant")]
    ZeroRankVariance { context: &'static str },

    /// All candidate weights identical: the weighted model degenerates to
    /// ordinary least squares and the exponent is unidentifiable.
    #[error("all weights are equal; the variance exponent is not identifiable")]
    AllWeightsEqual,

    /// Residuals vanish, so no variance structure can be estimated.
    #[error("residuals are numerically zero; variance structure is not identifiable")]
    ZeroResiduals,

    /// No direction through the regressors keeps the combined index strictly
    /// positive, so no power-law weight can be formed.
    #[error("no regressor combination stays strictly positive over the sample")]
    NoFeasibleDirection,

    /// Raising a weight to the trial exponent overflowed or underflowed.
    #[error("weight {weight} raised to exponent {exponent} is not representable")]
    WeightOverflow { weight: f64, exponent: f64 },

    /// The exponent score has no sign change inside the search interval.
    #[error("no root of the exponent score inside [{lo}, {hi}]")]
    NoRootInInterval { lo: f64, hi: f64 },

    /// The outer fixed-point loop failed to settle.
    #[error("exponent iteration did not converge within {max_iters} steps (last change {last_delta:.3e})")]
    DidNotConverge { max_iters: usize, last_delta: f64 },

    /// A solver or scenario configuration value is out of range.
    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },

    /// Not enough rows to split into usable halves.
    #[error("cannot split {n} rows in half and still fit {p} regressors plus intercept on each side")]
    SplitTooSmall { n: usize, p: usize },

    /// Nothing to aggregate or persist.
    #[error("no reports to write")]
    EmptyReport,

    /// Filesystem failure while writing artifacts.
    #[error("io failure at {path}: {message}")]
    Io { path: String, message: String },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
