use thiserror::Error;

/// Errors produced by model estimation, portfolio construction and data ingestion.
#[derive(Debug, Error)]
pub enum Error {
    /// Covariance factorization hit a non-positive pivot.
    #[error("covariance matrix is not positive definite (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    /// ab - c^2 is numerically zero: the frontier hyperbola degenerates.
    #[error("degenerate market: a*b - c^2 = {discriminant:.3e} is not positive")]
    DegenerateMarket { discriminant: f64 },

    /// Risk-free rate at or above the GMV return; no tangency on the efficient branch.
    #[error("risk-free rate {rf} is not below the GMV return {r_gmv}")]
    RateTooHigh { rf: f64, r_gmv: f64 },

    /// c <= 0: the GMV return is not positive, tangency from the origin is undefined.
    #[error("non-positive GMV return (c = {c})")]
    NonPositiveGmvReturn { c: f64 },

    /// Sharpe ratio requested for a portfolio with (numerically) zero risk.
    #[error("portfolio risk {risk:.3e} is too small for a Sharpe ratio")]
    ZeroRisk { risk: f64 },

    /// Rate interval has zero width where a proper interval is required.
    #[error("degenerate rate interval [{r1}, {r2}]")]
    DegenerateInterval { r1: f64, r2: f64 },

    /// r_TP / r_GMV <= 1: the full-interval closed form is undefined.
    #[error("return ratio r_TP/r_GMV = {ratio} is not above 1")]
    RatioTooSmall { ratio: f64 },

    /// No nonnegative portfolio can reach a positive excess return.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Active-set iteration limit exceeded (guards against cycling).
    #[error("QP active-set iteration limit {limit} exceeded")]
    MaxIterations { limit: usize },

    /// A supplied portfolio does not maximize its own-rate Sharpe ratio.
    #[error("portfolio {index} does not maximize its own Sharpe ratio at rate {rf}")]
    InvalidPairing { index: usize, rf: f64 },

    /// Backtest horizon exceeds the available return panel.
    #[error("horizon {horizon} exceeds the {available} available periods")]
    HorizonTooLong { horizon: usize, available: usize },

    /// A period split left one side without rows.
    #[error("split at {boundary:?} leaves the {side} sample empty")]
    EmptySide { boundary: String, side: &'static str },

    /// Malformed cell or line in an input file.
    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    /// The same period label appears twice.
    #[error("duplicate period label {label:?} at row {row}")]
    DuplicateDate { label: String, row: usize },

    /// A data row has the wrong number of fields.
    #[error("row {row} has {got} fields, expected {expected}")]
    RaggedRow { row: usize, expected: usize, got: usize },

    /// Price input must be strictly positive.
    #[error("non-positive price {value} at row {row}, column {col}")]
    NonPositivePrice { row: usize, col: usize, value: f64 },

    /// Sentinel value marking missing data in a source file.
    #[error("missing-data sentinel {value} at row {row}, column {col}")]
    MissingData { row: usize, col: usize, value: f64 },

    /// Shape or content validation failure not covered by a specific variant.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
