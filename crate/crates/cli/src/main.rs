//! `logopt` — backtest sliding-window log-optimal portfolios from the
//! command line.
//!
//! Three subcommands cover the whole workflow:
//!
//! * `backtest` — split a price CSV at a date, fit the classical and
//!   rolling strategies on data up to the split, score them after it, and
//!   emit a JSON report plus plot-ready CSV series.
//! * `solve` — one log-optimal solve over a date range, printed to stdout.
//! * `flip` — write the vertically flipped price history, for stress runs.
//!
//! Exit code 0 on success, 1 with a diagnostic on stderr for any failure.

mod commands;
mod report;

use std::path::PathBuf;

use chrono::NaiveDate;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "logopt", version, about = "Sliding-window log-optimal portfolio backtester")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score log-optimal strategies out of sample after a split date
    Backtest(BacktestArgs),
    /// Solve one log-optimal problem over a date range and print it
    Solve(SolveArgs),
    /// Flip a price history vertically and write the result
    Flip(FlipArgs),
}

#[derive(Args)]
pub struct BacktestArgs {
    /// Price CSV with header `date,<asset>,...`
    #[arg(long)]
    pub prices: PathBuf,

    /// Last in-sample date (YYYY-MM-DD); scoring starts after it
    #[arg(long)]
    pub split: NaiveDate,

    /// Comma-separated sliding-window sizes
    #[arg(long, value_delimiter = ',', default_value = "5,10,30,60,100")]
    pub windows: Vec<usize>,

    /// Per-period risk-free rate for Sharpe ratios
    #[arg(long, default_value_t = 0.0)]
    pub rf: f64,

    /// Initial account value
    #[arg(long, default_value_t = 1.0)]
    pub v0: f64,

    /// Where to write the JSON report
    #[arg(long)]
    pub report: PathBuf,

    /// Directory for the series CSVs (equity curves, weight trajectories)
    #[arg(long)]
    pub series: PathBuf,

    /// Run on the vertically flipped prices instead
    #[arg(long)]
    pub flip: bool,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Price CSV with header `date,<asset>,...`
    #[arg(long)]
    pub prices: PathBuf,

    /// First date of the solve range (default: first row)
    #[arg(long)]
    pub from: Option<NaiveDate>,

    /// Last date of the solve range (default: last row)
    #[arg(long)]
    pub to: Option<NaiveDate>,
}

#[derive(Args)]
pub struct FlipArgs {
    /// Price CSV to flip
    #[arg(long)]
    pub prices: PathBuf,

    /// Where to write the flipped CSV
    #[arg(long)]
    pub out: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests arrive here too; only genuine
            // usage errors are failures.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };

    let result = match &cli.command {
        Command::Backtest(args) => commands::backtest(args),
        Command::Solve(args) => commands::solve(args),
        Command::Flip(args) => commands::flip(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
