//! Subcommand implementations.

use anyhow::{bail, Context, Result};
use logopt::{
    compute_returns, flip_prices, load_price_file, solve_log_optimal, BacktestConfig,
    ReturnWindow, SolverConfig,
};

use crate::report::{self, ReportDoc};
use crate::{BacktestArgs, FlipArgs, SolveArgs};

pub fn backtest(args: &BacktestArgs) -> Result<()> {
    let loaded = load_price_file(&args.prices)
        .with_context(|| format!("failed to load prices from {}", args.prices.display()))?;
    let prices = if args.flip { flip_prices(&loaded) } else { loaded };

    let config = BacktestConfig {
        split: args.split,
        windows: args.windows.clone(),
        risk_free_rate: args.rf,
        initial_value: args.v0,
        solver: SolverConfig::default(),
    };
    let outcome = logopt::run_backtest(&prices, &config)?;

    std::fs::create_dir_all(&args.series)
        .with_context(|| format!("failed to create series directory {}", args.series.display()))?;
    let equity_path = args.series.join("equity.csv");
    report::write_equity_csv(&outcome, &equity_path)?;
    let mut weight_paths = Vec::new();
    for strategy in outcome.strategies.iter().filter(|s| s.window.is_some()) {
        let path = args.series.join(format!("weights_{}.csv", strategy.name));
        report::write_weights_csv(&outcome, strategy, &path)?;
        weight_paths.push((strategy.name.clone(), path));
    }

    let doc = ReportDoc::build(args, &outcome, &equity_path, &weight_paths);
    if let Some(parent) = args.report.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("failed to create report directory {}", parent.display()))?;
    }
    let json = serde_json::to_string_pretty(&doc)?;
    std::fs::write(&args.report, json + "\n")
        .with_context(|| format!("failed to write report to {}", args.report.display()))?;

    print!("{}", report::render_tables(&doc));
    Ok(())
}

pub fn solve(args: &SolveArgs) -> Result<()> {
    let prices = load_price_file(&args.prices)
        .with_context(|| format!("failed to load prices from {}", args.prices.display()))?;
    let dates = prices.dates();
    let from = args.from.unwrap_or(dates[0]);
    let to = args.to.unwrap_or_else(|| *dates.last().expect("non-empty series"));
    if from > to {
        bail!("--from {from} is after --to {to}");
    }

    let lo = dates.iter().position(|d| *d >= from);
    let hi = dates.iter().rposition(|d| *d <= to);
    let (Some(lo), Some(hi)) = (lo, hi) else {
        bail!("no price rows between {from} and {to}");
    };
    if lo + 1 > hi {
        bail!("need at least two price rows between {from} and {to} to form a return");
    }
    let range = prices.slice(lo, hi)?;
    let returns = compute_returns(&range);
    let window = ReturnWindow::new(returns.rows().to_vec())?;
    let result = solve_log_optimal(&window, &SolverConfig::default())?;

    println!("assets:      {}", prices.assets().join(" "));
    println!(
        "range:       {} to {} ({} return stages)",
        range.dates()[0],
        range.dates()[range.len() - 1],
        returns.len()
    );
    println!(
        "weights:     {}",
        result
            .weights
            .weights()
            .iter()
            .map(|w| format!("{w:.6}"))
            .collect::<Vec<_>>()
            .join(" ")
    );
    println!("objective:   {:.6e}", result.objective);
    println!("gap:         {:.3e}", result.gap);
    println!("iterations:  {}", result.iterations);
    Ok(())
}

pub fn flip(args: &FlipArgs) -> Result<()> {
    let prices = load_price_file(&args.prices)
        .with_context(|| format!("failed to load prices from {}", args.prices.display()))?;
    let flipped = flip_prices(&prices);
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("failed to create output directory {}", parent.display()))?;
    }
    report::write_price_csv(&flipped, &args.out)?;
    Ok(())
}
