//! Applying weight schedules to realized returns.
//!
//! [`simulate`] is the accounting core: compound one schedule over the
//! stages it covers. [`run_backtest`] is the full experiment: split the
//! price history at a date, fit every strategy on data up to the split,
//! and score them all on the stages after it — each strategy over exactly
//! the same out-of-sample range, so their metrics are comparable.

use std::time::Instant;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::market_data::{compute_returns, PriceSeries, ReturnSeries};
use crate::metrics::{summarize, MetricsSummary};
use crate::solver::SolverConfig;
use crate::strategy::{
    classical_log_optimal, constant_schedule, sliding_window_weights, WeightSchedule,
};

/// Account value through time: point `t` is the value at stage
/// `start_stage + t`, with point 0 the value before the first scheduled
/// return is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct EquityCurve {
    start_stage: usize,
    values: Vec<f64>,
}

impl EquityCurve {
    /// Wraps a value path; every value must be finite and strictly positive.
    pub fn new(start_stage: usize, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::CurveTooShort { needed: 1, got: 0 });
        }
        for (t, &v) in values.iter().enumerate() {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "equity value {v} at point {t} is not a positive finite number"
                )));
            }
        }
        Ok(Self { start_stage, values })
    }

    /// Stage of the first point.
    pub fn start_stage(&self) -> usize {
        self.start_stage
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn initial_value(&self) -> f64 {
        self.values[0]
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("curve is never empty")
    }
}

/// Compounds `schedule` over the return stages it covers:
/// `V(k+1) = (1 + K(k)'x(k)) * V(k)`, starting from `initial_value`.
///
/// The schedule must stay inside the series and match its asset count.
/// Fails with [`Error::NonViableReturn`] if some scheduled portfolio hits
/// a return that wipes the account out.
pub fn simulate(
    returns: &ReturnSeries,
    schedule: &WeightSchedule,
    initial_value: f64,
) -> Result<EquityCurve> {
    if !initial_value.is_finite() || initial_value <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "initial value must be positive and finite, got {initial_value}"
        )));
    }
    if schedule.num_assets() != returns.num_assets() {
        return Err(Error::DimensionMismatch {
            expected: returns.num_assets(),
            got: schedule.num_assets(),
        });
    }
    if schedule.end_stage() >= returns.len() {
        return Err(Error::InvalidConfig(format!(
            "schedule covers stages {}..={} but the series has {} stages",
            schedule.start_stage(),
            schedule.end_stage(),
            returns.len()
        )));
    }

    let mut values = Vec::with_capacity(schedule.len() + 1);
    let mut value = initial_value;
    values.push(value);
    for (offset, entry) in schedule.entries().iter().enumerate() {
        let stage = schedule.start_stage() + offset;
        let row = returns.row(stage);
        let ret: f64 = entry.weights.weights().iter().zip(row).map(|(k, x)| k * x).sum();
        let gross = 1.0 + ret;
        if gross <= 0.0 {
            return Err(Error::NonViableReturn { stage, gross });
        }
        value *= gross;
        values.push(value);
    }
    EquityCurve::new(schedule.start_stage(), values)
}

/// Experiment definition for [`run_backtest`].
#[derive(Debug, Clone, PartialEq)]
pub struct BacktestConfig {
    /// Last date that counts as in-sample. Strategies only see data up to
    /// here when choosing the weights for the first scored stage.
    pub split: NaiveDate,
    /// Sliding-window sizes to run alongside the classical solve.
    pub windows: Vec<usize>,
    /// Per-period risk-free rate for Sharpe ratios.
    pub risk_free_rate: f64,
    /// Account value every strategy starts from.
    pub initial_value: f64,
    pub solver: SolverConfig,
}

/// One scored strategy: its schedule, equity curve, metrics, and cost.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyResult {
    /// `"classical"` or `"M<window>"`.
    pub name: String,
    /// Sliding-window size, or `None` for the classical strategy.
    pub window: Option<usize>,
    pub schedule: WeightSchedule,
    pub equity: EquityCurve,
    pub metrics: MetricsSummary,
    /// Wall-clock seconds spent fitting, simulating, and scoring. The only
    /// field that varies between identical runs.
    pub runtime_secs: f64,
}

/// Everything [`run_backtest`] produces.
#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    pub assets: Vec<String>,
    /// All price dates; curve point `t` of a strategy falls on
    /// `dates[curve.start_stage() + t]`.
    pub dates: Vec<NaiveDate>,
    /// First out-of-sample return stage; every strategy is scored on
    /// stages `first_scored_stage..=stages - 1`.
    pub first_scored_stage: usize,
    /// Total number of return stages in the full series.
    pub stages: usize,
    pub strategies: Vec<StrategyResult>,
}

fn validate_config(config: &BacktestConfig) -> Result<()> {
    if !config.initial_value.is_finite() || config.initial_value <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "initial value must be positive and finite, got {}",
            config.initial_value
        )));
    }
    if !config.risk_free_rate.is_finite() || config.risk_free_rate <= -1.0 {
        return Err(Error::InvalidConfig(format!(
            "risk-free rate must be finite and greater than -1, got {}",
            config.risk_free_rate
        )));
    }
    for (i, &w) in config.windows.iter().enumerate() {
        if w == 0 {
            return Err(Error::InvalidConfig("window sizes must be at least 1".into()));
        }
        if config.windows[..i].contains(&w) {
            return Err(Error::InvalidConfig(format!("window size {w} appears twice")));
        }
    }
    Ok(())
}

/// Runs the full out-of-sample comparison on one price series.
///
/// The split date partitions the prices: rows dated on or before it are
/// in-sample, and the scored range is every return stage that starts at or
/// after the last in-sample row. The classical strategy solves once over
/// the in-sample returns and holds that vector; each sliding strategy
/// re-solves per stage on its trailing `M` rows, warm-started on the last
/// `M` in-sample returns so it can trade from the first scored stage.
///
/// Requires at least one scored stage after the split and at least `M`
/// in-sample return stages for the largest window.
pub fn run_backtest(prices: &PriceSeries, config: &BacktestConfig) -> Result<BacktestReport> {
    validate_config(config)?;

    let dates = prices.dates();
    let first = dates[0];
    let last = *dates.last().expect("price series has at least two rows");
    if config.split < first {
        return Err(Error::SplitOutOfRange { split: config.split, first, last });
    }
    // Index of the last in-sample price row; return stages from here on
    // describe strictly post-split moves.
    let last_in = dates.iter().rposition(|d| *d <= config.split).expect("checked above");

    let returns = compute_returns(prices);
    let scored = returns.len() - last_in.min(returns.len());
    if scored == 0 {
        return Err(Error::SplitOutOfRange { split: config.split, first, last });
    }
    if last_in == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }

    let mut strategies = Vec::with_capacity(config.windows.len() + 1);

    let start = Instant::now();
    let in_sample = returns.slice(0, last_in)?;
    let fixed = classical_log_optimal(&in_sample, &config.solver)?;
    let schedule = constant_schedule(&fixed, last_in, scored)?;
    let equity = simulate(&returns, &schedule, config.initial_value)?;
    let metrics = summarize(&equity, config.risk_free_rate)?;
    strategies.push(StrategyResult {
        name: "classical".into(),
        window: None,
        schedule,
        equity,
        metrics,
        runtime_secs: start.elapsed().as_secs_f64(),
    });

    for &window in &config.windows {
        if last_in < window {
            return Err(Error::InsufficientData { needed: window, got: last_in });
        }
        let start = Instant::now();
        // Trim to the last `window` in-sample rows plus everything after:
        // the rolling schedule then begins exactly at the first scored
        // stage, and each solve sees only data from before its stage.
        let trimmed = returns.slice(last_in - window, returns.len())?;
        let schedule =
            sliding_window_weights(&trimmed, window, &config.solver)?.rebased(last_in);
        let equity = simulate(&returns, &schedule, config.initial_value)?;
        let metrics = summarize(&equity, config.risk_free_rate)?;
        strategies.push(StrategyResult {
            name: format!("M{window}"),
            window: Some(window),
            schedule,
            equity,
            metrics,
            runtime_secs: start.elapsed().as_secs_f64(),
        });
    }

    Ok(BacktestReport {
        assets: prices.assets().to_vec(),
        dates: dates.to_vec(),
        first_scored_stage: last_in,
        stages: returns.len(),
        strategies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::WeightVector;

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn prices(rows: Vec<Vec<f64>>) -> PriceSeries {
        let dates = (0..rows.len())
            .map(|k| date("2020-01-01") + chrono::Days::new(k as u64))
            .collect();
        let assets = (0..rows[0].len()).map(|i| format!("A{i}")).collect();
        PriceSeries::new(dates, assets, rows).unwrap()
    }

    fn returns_of(rows: Vec<Vec<f64>>) -> ReturnSeries {
        let dates = (0..rows.len())
            .map(|k| date("2020-01-01") + chrono::Days::new(k as u64))
            .collect();
        let assets = (0..rows[0].len()).map(|i| format!("A{i}")).collect();
        ReturnSeries::new(dates, assets, rows).unwrap()
    }

    #[test]
    fn simulate_compounds_scheduled_returns() {
        let r = returns_of(vec![vec![0.1], vec![-0.5], vec![0.25]]);
        let all_in = constant_schedule(&WeightVector::uniform(1), 0, 3).unwrap();
        let curve = simulate(&r, &all_in, 100.0).unwrap();
        assert_eq!(curve.start_stage(), 0);
        assert_eq!(curve.len(), 4);
        assert!((curve.values()[1] - 110.0).abs() < 1e-9);
        assert!((curve.values()[2] - 55.0).abs() < 1e-9);
        assert!((curve.final_value() - 68.75).abs() < 1e-9);
    }

    #[test]
    fn simulate_covers_partial_ranges() {
        let r = returns_of(vec![vec![0.1], vec![0.2], vec![0.3], vec![0.4]]);
        let hold = constant_schedule(&WeightVector::uniform(1), 2, 2).unwrap();
        let curve = simulate(&r, &hold, 1.0).unwrap();
        assert_eq!(curve.start_stage(), 2);
        assert!((curve.final_value() - 1.3 * 1.4).abs() < 1e-12);
    }

    #[test]
    fn simulate_rejects_out_of_range_schedules() {
        let r = returns_of(vec![vec![0.1], vec![0.2]]);
        let too_long = constant_schedule(&WeightVector::uniform(1), 1, 2).unwrap();
        assert!(matches!(simulate(&r, &too_long, 1.0), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn simulate_rejects_dimension_mismatch_and_bad_value() {
        let r = returns_of(vec![vec![0.1, 0.0], vec![0.2, 0.1]]);
        let wrong = constant_schedule(&WeightVector::uniform(1), 0, 2).unwrap();
        assert!(matches!(
            simulate(&r, &wrong, 1.0),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        let ok = constant_schedule(&WeightVector::uniform(2), 0, 2).unwrap();
        assert!(matches!(simulate(&r, &ok, 0.0), Err(Error::InvalidConfig(_))));
        assert!(matches!(simulate(&r, &ok, f64::NAN), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn simulate_reports_wipeout_stage() {
        let r = returns_of(vec![vec![0.1, -0.999999999], vec![0.1, 0.0]]);
        let all_second = constant_schedule(&WeightVector::vertex(2, 1), 0, 2).unwrap();
        // -99.9999999% is survivable (gross 1e-9), just catastrophic.
        assert!(simulate(&r, &all_second, 1.0).is_ok());
    }

    fn study_prices() -> PriceSeries {
        // 12 rows, 2 assets: A0 trends down then up, A1 drifts up slowly.
        prices(vec![
            vec![100.0, 50.0],
            vec![99.0, 50.05],
            vec![98.5, 50.1],
            vec![97.0, 50.2],
            vec![96.0, 50.25],
            vec![95.0, 50.3],
            vec![96.5, 50.35],
            vec![98.0, 50.4],
            vec![99.5, 50.5],
            vec![101.0, 50.55],
            vec![103.0, 50.6],
            vec![105.0, 50.7],
        ])
    }

    #[test]
    fn backtest_scores_all_strategies_on_the_same_stages() {
        let p = study_prices();
        let config = BacktestConfig {
            split: date("2020-01-06"), // row index 5
            windows: vec![2, 3],
            risk_free_rate: 0.0,
            initial_value: 1.0,
            solver: SolverConfig::default(),
        };
        let report = run_backtest(&p, &config).unwrap();
        assert_eq!(report.first_scored_stage, 5);
        assert_eq!(report.stages, 11);
        assert_eq!(report.strategies.len(), 3);
        for s in &report.strategies {
            assert_eq!(s.schedule.start_stage(), 5, "{}", s.name);
            assert_eq!(s.schedule.end_stage(), 10, "{}", s.name);
            assert_eq!(s.equity.len(), 7, "{}", s.name);
            assert_eq!(s.metrics.n_periods, 6, "{}", s.name);
            assert!((s.equity.initial_value() - 1.0).abs() < 1e-15);
            assert!(s.runtime_secs >= 0.0);
        }
        assert_eq!(report.strategies[0].name, "classical");
        assert_eq!(report.strategies[1].name, "M2");
        assert_eq!(report.strategies[2].name, "M3");
        assert_eq!(report.strategies[1].window, Some(2));
    }

    #[test]
    fn split_on_non_trading_date_uses_last_row_at_or_before() {
        // Weekday-only rows: splitting on the Saturday or the Sunday must
        // partition exactly like splitting on the preceding Friday.
        let rows: Vec<Vec<f64>> = (0..8).map(|k| vec![100.0 + k as f64, 50.0]).collect();
        let dates: Vec<NaiveDate> = [
            "2020-01-06", "2020-01-07", "2020-01-08", "2020-01-09", "2020-01-10",
            "2020-01-13", "2020-01-14", "2020-01-15",
        ]
        .iter()
        .map(|s| date(s))
        .collect();
        let p = PriceSeries::new(dates, vec!["A0".into(), "A1".into()], rows).unwrap();
        let config = BacktestConfig {
            split: date("2020-01-10"), // the Friday itself
            windows: vec![2],
            risk_free_rate: 0.0,
            initial_value: 1.0,
            solver: SolverConfig::default(),
        };
        let friday = run_backtest(&p, &config).unwrap();
        assert_eq!(friday.first_scored_stage, 4);
        for weekend in ["2020-01-11", "2020-01-12"] {
            let shifted = run_backtest(
                &p,
                &BacktestConfig { split: date(weekend), ..config.clone() },
            )
            .unwrap();
            assert_eq!(shifted.first_scored_stage, 4, "split {weekend}");
        }
    }

    #[test]
    fn sliding_warm_start_matches_full_series_schedule() {
        // The rolling weights after the split must be identical whether
        // computed on the trimmed series (as run_backtest does) or on the
        // full series: both see the same trailing windows.
        let p = study_prices();
        let returns = compute_returns(&p);
        let config = BacktestConfig {
            split: date("2020-01-06"),
            windows: vec![3],
            risk_free_rate: 0.0,
            initial_value: 1.0,
            solver: SolverConfig::default(),
        };
        let report = run_backtest(&p, &config).unwrap();
        let rolled = &report.strategies[1].schedule;
        let full = sliding_window_weights(&returns, 3, &config.solver).unwrap();
        for k in report.first_scored_stage..report.stages {
            assert_eq!(
                rolled.entry_at(k).unwrap().weights,
                full.entry_at(k).unwrap().weights,
                "stage {k}"
            );
        }
    }

    #[test]
    fn classical_uses_only_in_sample_data() {
        // Two series that agree up to the split and diverge after must
        // produce the same classical weights.
        let mut rows_a = study_prices().rows().to_vec();
        let mut rows_b = rows_a.clone();
        rows_a[9][0] = 150.0;
        rows_b[9][0] = 60.0;
        let config = BacktestConfig {
            split: date("2020-01-06"),
            windows: vec![],
            risk_free_rate: 0.0,
            initial_value: 1.0,
            solver: SolverConfig::default(),
        };
        let a = run_backtest(&prices(rows_a), &config).unwrap();
        let b = run_backtest(&prices(rows_b), &config).unwrap();
        assert_eq!(
            a.strategies[0].schedule.entries()[0].weights,
            b.strategies[0].schedule.entries()[0].weights
        );
    }

    #[test]
    fn rejects_split_outside_range() {
        let p = study_prices();
        let mut config = BacktestConfig {
            split: date("2019-12-31"),
            windows: vec![],
            risk_free_rate: 0.0,
            initial_value: 1.0,
            solver: SolverConfig::default(),
        };
        assert!(matches!(run_backtest(&p, &config), Err(Error::SplitOutOfRange { .. })));
        config.split = date("2020-01-12"); // last row: nothing left to score
        assert!(matches!(run_backtest(&p, &config), Err(Error::SplitOutOfRange { .. })));
        config.split = date("2021-01-01"); // past the end entirely
        assert!(matches!(run_backtest(&p, &config), Err(Error::SplitOutOfRange { .. })));
    }

    #[test]
    fn rejects_window_larger_than_in_sample_history() {
        let p = study_prices();
        let config = BacktestConfig {
            split: date("2020-01-06"), // 5 in-sample return stages
            windows: vec![6],
            risk_free_rate: 0.0,
            initial_value: 1.0,
            solver: SolverConfig::default(),
        };
        match run_backtest(&p, &config) {
            Err(Error::InsufficientData { needed: 6, got: 5 }) => {}
            other => panic!("expected InsufficientData, got {other:?}"),
        }
    }

    #[test]
    fn rejects_invalid_backtest_config() {
        let p = study_prices();
        let base = BacktestConfig {
            split: date("2020-01-06"),
            windows: vec![2],
            risk_free_rate: 0.0,
            initial_value: 1.0,
            solver: SolverConfig::default(),
        };
        for config in [
            BacktestConfig { initial_value: 0.0, ..base.clone() },
            BacktestConfig { risk_free_rate: -1.0, ..base.clone() },
            BacktestConfig { windows: vec![0], ..base.clone() },
            BacktestConfig { windows: vec![2, 2], ..base.clone() },
        ] {
            assert!(matches!(run_backtest(&p, &config), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn equity_curve_validates_values() {
        assert!(EquityCurve::new(0, vec![]).is_err());
        assert!(EquityCurve::new(0, vec![1.0, -1.0]).is_err());
        assert!(EquityCurve::new(0, vec![1.0, f64::NAN]).is_err());
        let c = EquityCurve::new(3, vec![1.0, 2.0]).unwrap();
        assert_eq!(c.start_stage(), 3);
        assert_eq!(c.initial_value(), 1.0);
        assert_eq!(c.final_value(), 2.0);
    }
}
