//! Data-driven log-optimal portfolio construction with a sliding window,
//! plus the simulation and reporting machinery needed to backtest it.
//!
//! The pipeline runs in four steps, one module per step:
//!
//! 1. [`market_data`] — load a daily price CSV and turn it into per-period
//!    arithmetic returns.
//! 2. [`solver`] — maximize the empirical log-growth rate over the unit
//!    simplex (long-only, fully invested) by projected gradient ascent,
//!    with a duality-gap certificate on the result.
//! 3. [`strategy`] — produce a weight schedule per stage: either one
//!    classical solve over all data, or a rolling re-solve over the most
//!    recent `M` return observations.
//! 4. [`backtest`] / [`metrics`] — apply a schedule to realized returns,
//!    track the account value, and summarize performance.
//!
//! Everything is deterministic: the same inputs produce bit-identical
//! weights, equity curves, and metrics on every run.

pub mod backtest;
pub mod error;
pub mod market_data;
pub mod metrics;
pub mod solver;
pub mod strategy;

pub use backtest::{run_backtest, simulate, BacktestConfig, BacktestReport, EquityCurve, StrategyResult};
pub use error::{Error, Result};
pub use market_data::{
    append_cash_asset, compute_returns, flip_prices, load_price_csv, load_price_file, slice_window,
    PriceSeries, ReturnSeries, ReturnWindow,
};
pub use metrics::{
    annualized_volatility, cumulative_return, max_drawdown, per_period_returns, realized_log_growth,
    sharpe_ratio, summarize, MetricsSummary, SharpeRatio, TRADING_DAYS_PER_YEAR,
};
pub use solver::{
    log_growth_gradient, log_growth_objective, optimality_gap, project_to_simplex, solve_log_optimal,
    SolveResult, SolverConfig, WeightVector,
};
pub use strategy::{
    classical_log_optimal, constant_schedule, sliding_window_weights, ScheduleEntry, WeightSchedule,
};
