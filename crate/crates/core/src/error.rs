//! Error type shared across the crate.

use crate::solver::SolveResult;

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while loading data, solving for weights,
/// or running a backtest.
#[derive(thiserror::Error, Debug)]
pub enum Error {
    /// Underlying I/O failure while reading or writing a file.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    /// A CSV row (or the header) could not be interpreted.
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    /// Prices must be strictly positive to define arithmetic returns.
    #[error("non-positive price {value} for asset {asset} at line {line}")]
    NonPositivePrice {
        line: usize,
        asset: String,
        value: f64,
    },

    /// Price rows must be in strictly increasing date order.
    #[error("dates not in increasing order at line {line}")]
    UnsortedDates { line: usize },

    /// The same date appears on two rows.
    #[error("duplicate date at line {line}")]
    DuplicateDate { line: usize },

    /// The input ended before enough rows were seen.
    #[error("too few rows: need at least {needed}, got {got}")]
    TooFewRows { needed: usize, got: usize },

    /// A return entry must be finite and strictly greater than -1.
    #[error("invalid return {value} at stage {stage}")]
    InvalidReturn { stage: usize, value: f64 },

    /// Requested window does not fit the available return stages.
    #[error(
        "window of size {window} ending at stage {stage} is out of range \
         for a series with {stages} return stages"
    )]
    WindowOutOfRange {
        stage: usize,
        window: usize,
        stages: usize,
    },

    /// Not enough history to run the requested strategy.
    #[error("insufficient data: need at least {needed} return stages, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// A weight vector or gradient does not match the asset count of the data.
    #[error("dimension mismatch: expected {expected} assets, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Some candidate portfolio wipes out the account on an observed return
    /// (gross growth `1 + k'x` is not strictly positive), so the log-growth
    /// objective is undefined there.
    #[error("non-viable portfolio: gross growth {gross} at stage {stage} is not positive")]
    NonViableReturn { stage: usize, gross: f64 },

    /// The solver exhausted its iteration budget before certifying the
    /// requested optimality gap. Carries the best iterate found so callers
    /// can inspect how close it got.
    #[error(
        "solver did not converge{}: best certified gap {gap:.3e} after {iterations} iterations",
        stage.map(|k| format!(" at stage {k}")).unwrap_or_default()
    )]
    DidNotConverge {
        /// Rolling stage the solve belonged to, when known.
        stage: Option<usize>,
        gap: f64,
        iterations: usize,
        /// Best iterate observed before giving up.
        best: Box<SolveResult>,
    },

    /// An equity curve with fewer than two points has no returns to measure.
    #[error("equity curve too short: need at least {needed} points, got {got}")]
    CurveTooShort { needed: usize, got: usize },

    /// Sharpe ratios are undefined when the excess returns have zero spread.
    #[error("volatility is zero over {periods} periods; Sharpe ratio is undefined")]
    DegenerateVolatility { periods: usize },

    /// The requested split date leaves no out-of-sample stage to score.
    #[error("split date {split} leaves no out-of-sample data (price range {first} to {last})")]
    SplitOutOfRange {
        split: chrono::NaiveDate,
        first: chrono::NaiveDate,
        last: chrono::NaiveDate,
    },

    /// A configuration value is structurally invalid.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
