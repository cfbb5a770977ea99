//! Report document, table rendering, and series CSV writers.
//!
//! The JSON document is the single source of truth: the stdout tables are
//! rendered from it, so a number can never appear in the tables without
//! also being in the report. Series files key every row by calendar date.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use logopt::{BacktestReport, MetricsSummary, StrategyResult};
use serde::Serialize;

use crate::BacktestArgs;

#[derive(Serialize)]
pub struct ReportDoc {
    pub config: ConfigDoc,
    pub strategies: Vec<StrategyDoc>,
    pub series_paths: SeriesPathsDoc,
}

#[derive(Serialize)]
pub struct ConfigDoc {
    pub prices: String,
    pub split: String,
    pub windows: Vec<usize>,
    pub risk_free_rate: f64,
    pub initial_value: f64,
    pub flip: bool,
    pub report: String,
    pub series: String,
}

#[derive(Serialize)]
pub struct StrategyDoc {
    pub name: String,
    /// Sliding-window size; absent for the classical strategy.
    pub window: Option<usize>,
    /// Weights held over the last scored stage.
    pub weights_final: Vec<f64>,
    pub metrics: MetricsSummary,
    /// Wall-clock seconds; the one field that varies between runs.
    pub runtime_secs: f64,
}

#[derive(Serialize)]
pub struct SeriesPathsDoc {
    pub equity: String,
    pub weights: Vec<WeightSeriesDoc>,
}

#[derive(Serialize)]
pub struct WeightSeriesDoc {
    pub strategy: String,
    pub path: String,
}

impl ReportDoc {
    pub fn build(
        args: &BacktestArgs,
        outcome: &BacktestReport,
        equity_path: &Path,
        weight_paths: &[(String, PathBuf)],
    ) -> Self {
        let strategies = outcome
            .strategies
            .iter()
            .map(|s| StrategyDoc {
                name: s.name.clone(),
                window: s.window,
                weights_final: s
                    .schedule
                    .entries()
                    .last()
                    .expect("schedules are never empty")
                    .weights
                    .weights()
                    .to_vec(),
                metrics: s.metrics.clone(),
                runtime_secs: s.runtime_secs,
            })
            .collect();
        ReportDoc {
            config: ConfigDoc {
                prices: args.prices.display().to_string(),
                split: args.split.to_string(),
                windows: args.windows.clone(),
                risk_free_rate: args.rf,
                initial_value: args.v0,
                flip: args.flip,
                report: args.report.display().to_string(),
                series: args.series.display().to_string(),
            },
            strategies,
            series_paths: SeriesPathsDoc {
                equity: equity_path.display().to_string(),
                weights: weight_paths
                    .iter()
                    .map(|(strategy, path)| WeightSeriesDoc {
                        strategy: strategy.clone(),
                        path: path.display().to_string(),
                    })
                    .collect(),
            },
        }
    }
}

fn pct(x: f64) -> String {
    format!("{:.2}%", 100.0 * x)
}

fn table_row(out: &mut String, label: &str, value: String) {
    let _ = writeln!(out, "  {label:<32} {value:>12}");
}

fn strategy_table(out: &mut String, s: &StrategyDoc) {
    let _ = writeln!(out);
    match s.window {
        Some(m) => {
            let _ = writeln!(out, "Strategy {} (sliding window of {m} stages)", s.name);
        }
        None => {
            let _ = writeln!(out, "Strategy {} (single solve over all in-sample data)", s.name);
        }
    }
    let m: &MetricsSummary = &s.metrics;
    table_row(out, "Maximum percentage drawdown", pct(m.max_drawdown));
    table_row(out, "Cumulative rate of return", pct(m.cumulative_return));
    table_row(out, "Realized log-growth", pct(m.realized_log_growth));
    table_row(out, "Volatility (annualized)", pct(m.annualized_volatility));
    table_row(out, "Sharpe ratio (sqrt(N) x SR)", format!("{:.3}", m.sharpe_n_period));
    table_row(out, "Sharpe ratio (annualized)", format!("{:.3}", m.sharpe_annualized));
    table_row(out, "Running time (secs)", format!("{:.3}", s.runtime_secs));
    let weights = s
        .weights_final
        .iter()
        .map(|w| format!("{w:.6}"))
        .collect::<Vec<_>>()
        .join(" ");
    table_row(out, "Final weights", weights);
}

/// Renders the per-strategy metric tables, entirely from the document.
pub fn render_tables(doc: &ReportDoc) -> String {
    let mut out = String::new();
    let flip_note = if doc.config.flip { ", prices flipped" } else { "" };
    let _ = writeln!(
        out,
        "Backtest of {} (split {}{}; report {}, series in {})",
        doc.config.prices, doc.config.split, flip_note, doc.config.report, doc.config.series
    );
    for s in &doc.strategies {
        strategy_table(&mut out, s);
    }
    out
}

/// One equity file for the whole run: `date` plus one column per strategy.
/// Row `t` is each strategy's account value at that date, starting with
/// the initial value on the split row.
pub fn write_equity_csv(outcome: &BacktestReport, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("date");
    for s in &outcome.strategies {
        out.push(',');
        out.push_str(&s.name);
    }
    out.push('\n');

    let start = outcome.first_scored_stage;
    let points = outcome.stages - start + 1;
    for t in 0..points {
        let _ = write!(out, "{}", outcome.dates[start + t]);
        for s in &outcome.strategies {
            let _ = write!(out, ",{}", s.equity.values()[t]);
        }
        out.push('\n');
    }
    std::fs::write(path, out)
        .with_context(|| format!("failed to write equity series to {}", path.display()))?;
    Ok(())
}

/// One weight-trajectory file per sliding strategy: `date` plus one column
/// per asset; row `k` holds the weights applied over stage `k`.
pub fn write_weights_csv(outcome: &BacktestReport, strategy: &StrategyResult, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("date");
    for asset in &outcome.assets {
        out.push(',');
        out.push_str(asset);
    }
    out.push('\n');

    for (offset, entry) in strategy.schedule.entries().iter().enumerate() {
        let stage = strategy.schedule.start_stage() + offset;
        let _ = write!(out, "{}", outcome.dates[stage]);
        for w in entry.weights.weights() {
            let _ = write!(out, ",{w}");
        }
        out.push('\n');
    }
    std::fs::write(path, out)
        .with_context(|| format!("failed to write weight series to {}", path.display()))?;
    Ok(())
}

/// Prices in the same CSV format the loader accepts.
pub fn write_price_csv(prices: &logopt::PriceSeries, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("date");
    for asset in prices.assets() {
        out.push(',');
        out.push_str(asset);
    }
    out.push('\n');
    for (date, row) in prices.dates().iter().zip(prices.rows()) {
        let _ = write!(out, "{date}");
        for p in row {
            let _ = write!(out, ",{p}");
        }
        out.push('\n');
    }
    std::fs::write(path, out)
        .with_context(|| format!("failed to write prices to {}", path.display()))?;
    Ok(())
}
