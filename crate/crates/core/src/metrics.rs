//! Performance metrics over an equity curve.
//!
//! All metrics are scale-free: multiplying every account value by the same
//! positive constant changes nothing. Annualization assumes daily stages
//! and uses [`TRADING_DAYS_PER_YEAR`].

use serde::Serialize;

use crate::backtest::EquityCurve;
use crate::error::{Error, Result};

/// Trading periods per year used to annualize daily statistics.
pub const TRADING_DAYS_PER_YEAR: f64 = 252.0;

/// Sharpe ratio at two horizons: the raw per-period ratio and the
/// `sqrt(N)`-scaled ratio over the whole N-period run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpeRatio {
    /// Mean excess return divided by its sample standard deviation.
    pub per_period: f64,
    /// `sqrt(N)` times the per-period ratio.
    pub n_period: f64,
}

/// Everything the report prints about one strategy's equity curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsSummary {
    /// Number of return periods `N` the curve spans.
    pub n_periods: usize,
    /// Per-period risk-free rate the Sharpe ratios are measured against.
    pub risk_free_rate: f64,
    /// `V(end) / V(start) - 1`.
    pub cumulative_return: f64,
    /// `log(V(end) / V(start))`.
    pub realized_log_growth: f64,
    /// Sample standard deviation of per-period returns, times `sqrt(252)`.
    pub annualized_volatility: f64,
    /// Mean excess return over its standard deviation, per period.
    pub sharpe_per_period: f64,
    /// Per-period Sharpe scaled by `sqrt(N)`.
    pub sharpe_n_period: f64,
    /// Per-period Sharpe scaled by `sqrt(252)`.
    pub sharpe_annualized: f64,
    /// Maximum percentage drawdown, in `[0, 1)`.
    pub max_drawdown: f64,
}

/// Per-period simple returns of the account: `V(k+1)/V(k) - 1`.
pub fn per_period_returns(curve: &EquityCurve) -> Result<Vec<f64>> {
    let v = curve.values();
    if v.len() < 2 {
        return Err(Error::CurveTooShort { needed: 2, got: v.len() });
    }
    Ok(v.windows(2).map(|w| w[1] / w[0] - 1.0).collect())
}

/// Total simple return over the whole curve, `V(end)/V(start) - 1`.
pub fn cumulative_return(curve: &EquityCurve) -> Result<f64> {
    let v = curve.values();
    if v.len() < 2 {
        return Err(Error::CurveTooShort { needed: 2, got: v.len() });
    }
    Ok(v[v.len() - 1] / v[0] - 1.0)
}

/// Realized log-growth over the whole curve, `log(V(end)/V(start))`.
pub fn realized_log_growth(curve: &EquityCurve) -> Result<f64> {
    let v = curve.values();
    if v.len() < 2 {
        return Err(Error::CurveTooShort { needed: 2, got: v.len() });
    }
    Ok((v[v.len() - 1] / v[0]).ln())
}

fn mean_and_sample_stdev(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Sharpe ratio of a return sequence against a constant per-period
/// risk-free rate, using the unbiased (`N - 1`) standard deviation.
///
/// Needs at least two returns, and fails with
/// [`Error::DegenerateVolatility`] when the excess returns are constant.
pub fn sharpe_ratio(returns: &[f64], risk_free_rate: f64) -> Result<SharpeRatio> {
    if returns.len() < 2 {
        return Err(Error::CurveTooShort { needed: 2, got: returns.len() });
    }
    let excess: Vec<f64> = returns.iter().map(|r| r - risk_free_rate).collect();
    let (mean, stdev) = mean_and_sample_stdev(&excess);
    if stdev == 0.0 {
        return Err(Error::DegenerateVolatility { periods: returns.len() });
    }
    let per_period = mean / stdev;
    Ok(SharpeRatio {
        per_period,
        n_period: (returns.len() as f64).sqrt() * per_period,
    })
}

/// Sample standard deviation of the returns scaled by `sqrt(252)`.
pub fn annualized_volatility(returns: &[f64]) -> Result<f64> {
    if returns.len() < 2 {
        return Err(Error::CurveTooShort { needed: 2, got: returns.len() });
    }
    let (_, stdev) = mean_and_sample_stdev(returns);
    Ok(stdev * TRADING_DAYS_PER_YEAR.sqrt())
}

/// Maximum percentage drawdown: the largest peak-to-trough loss
/// `(peak - V(k)) / peak` over the curve, in `[0, 1)`.
///
/// Single pass: track the running peak and the worst drop below it.
pub fn max_drawdown(curve: &EquityCurve) -> Result<f64> {
    let v = curve.values();
    if v.len() < 2 {
        return Err(Error::CurveTooShort { needed: 2, got: v.len() });
    }
    let mut peak = v[0];
    let mut worst = 0.0f64;
    for &value in &v[1..] {
        if value > peak {
            peak = value;
        } else {
            worst = worst.max((peak - value) / peak);
        }
    }
    Ok(worst)
}

/// Computes the full [`MetricsSummary`] for one curve.
pub fn summarize(curve: &EquityCurve, risk_free_rate: f64) -> Result<MetricsSummary> {
    let returns = per_period_returns(curve)?;
    let sharpe = sharpe_ratio(&returns, risk_free_rate)?;
    Ok(MetricsSummary {
        n_periods: returns.len(),
        risk_free_rate,
        cumulative_return: cumulative_return(curve)?,
        realized_log_growth: realized_log_growth(curve)?,
        annualized_volatility: annualized_volatility(&returns)?,
        sharpe_per_period: sharpe.per_period,
        sharpe_n_period: sharpe.n_period,
        sharpe_annualized: TRADING_DAYS_PER_YEAR.sqrt() * sharpe.per_period,
        max_drawdown: max_drawdown(curve)?,
    })
}
