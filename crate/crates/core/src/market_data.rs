//! Price and return series: CSV loading, validation, and the
//! transformations the strategies consume.
//!
//! The expected input is a daily close-price table,
//!
//! ```text
//! date,VT,BND,BNDX
//! 2019-01-02,70.31,77.89,52.60
//! 2019-01-03,69.64,78.30,52.79
//! ```
//!
//! with ISO dates in strictly increasing order and strictly positive,
//! finite prices. Retrieval stamp, adjustment method, and vendor are the
//! caller's concern; this module only enforces structure.
//!
//! Indexing convention used throughout the crate: a price series with `T`
//! rows (stages `0..T-1`) yields `T-1` return rows, where return stage `k`
//! is the move from price `k` to price `k+1` and is dated with the stage-`k`
//! date. A weight chosen *for* stage `k` is applied to return `x(k)`.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// Validated table of daily close prices: `T` dated rows over `m` assets.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    dates: Vec<NaiveDate>,
    assets: Vec<String>,
    /// Row-major: `prices[k][i]` is the price of asset `i` at stage `k`.
    prices: Vec<Vec<f64>>,
}

impl PriceSeries {
    /// Builds a series from parts, enforcing every structural invariant:
    /// at least two rows, at least one asset, rectangular shape, strictly
    /// increasing dates, and strictly positive finite prices.
    pub fn new(dates: Vec<NaiveDate>, assets: Vec<String>, prices: Vec<Vec<f64>>) -> Result<Self> {
        if assets.is_empty() {
            return Err(Error::InvalidConfig("price series needs at least one asset".into()));
        }
        if dates.len() != prices.len() {
            return Err(Error::InvalidConfig(format!(
                "{} dates for {} price rows",
                dates.len(),
                prices.len()
            )));
        }
        if prices.len() < 2 {
            return Err(Error::TooFewRows { needed: 2, got: prices.len() });
        }
        for (k, row) in prices.iter().enumerate() {
            if row.len() != assets.len() {
                return Err(Error::MalformedRow {
                    line: k + 1,
                    reason: format!("expected {} prices, got {}", assets.len(), row.len()),
                });
            }
            for (i, &p) in row.iter().enumerate() {
                if !p.is_finite() {
                    return Err(Error::MalformedRow {
                        line: k + 1,
                        reason: format!("non-finite price for asset {}", assets[i]),
                    });
                }
                if p <= 0.0 {
                    return Err(Error::NonPositivePrice {
                        line: k + 1,
                        asset: assets[i].clone(),
                        value: p,
                    });
                }
            }
            if k > 0 {
                if dates[k] == dates[k - 1] {
                    return Err(Error::DuplicateDate { line: k + 1 });
                }
                if dates[k] < dates[k - 1] {
                    return Err(Error::UnsortedDates { line: k + 1 });
                }
            }
        }
        Ok(Self { dates, assets, prices })
    }

    /// Number of price rows `T`.
    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    /// Number of assets `m`.
    pub fn num_assets(&self) -> usize {
        self.assets.len()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn assets(&self) -> &[String] {
        &self.assets
    }

    /// Price row at stage `k`.
    pub fn row(&self, k: usize) -> &[f64] {
        &self.prices[k]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.prices
    }

    /// Copy of the rows between stages `from..=to` (inclusive both ends).
    pub fn slice(&self, from: usize, to: usize) -> Result<PriceSeries> {
        if from > to || to >= self.len() {
            return Err(Error::InvalidConfig(format!(
                "price slice {from}..={to} out of range for {} rows",
                self.len()
            )));
        }
        PriceSeries::new(
            self.dates[from..=to].to_vec(),
            self.assets.clone(),
            self.prices[from..=to].to_vec(),
        )
    }
}

/// Per-period arithmetic returns derived from a [`PriceSeries`].
///
/// Row `k` holds `x_i(k) = (s_i(k+1) - s_i(k)) / s_i(k)` and carries the
/// stage-`k` date: it is the return an investor captures by holding from
/// stage `k` to `k+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    dates: Vec<NaiveDate>,
    assets: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl ReturnSeries {
    /// Builds a series from parts, enforcing shape and that every entry is
    /// finite and strictly greater than -1 (a -100% period would wipe out
    /// any position in that asset and break the log-growth objective).
    pub fn new(dates: Vec<NaiveDate>, assets: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if assets.is_empty() {
            return Err(Error::InvalidConfig("return series needs at least one asset".into()));
        }
        if dates.len() != rows.len() {
            return Err(Error::InvalidConfig(format!(
                "{} dates for {} return rows",
                dates.len(),
                rows.len()
            )));
        }
        for (k, row) in rows.iter().enumerate() {
            if row.len() != assets.len() {
                return Err(Error::MalformedRow {
                    line: k + 1,
                    reason: format!("expected {} returns, got {}", assets.len(), row.len()),
                });
            }
            for &x in row {
                if !x.is_finite() || x <= -1.0 {
                    return Err(Error::InvalidReturn { stage: k, value: x });
                }
            }
        }
        Ok(Self { dates, assets, rows })
    }

    /// Number of return stages (one less than the price rows it came from).
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn num_assets(&self) -> usize {
        self.assets.len()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn assets(&self) -> &[String] {
        &self.assets
    }

    /// Return row for stage `k`.
    pub fn row(&self, k: usize) -> &[f64] {
        &self.rows[k]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Copy of the stages `from..to` (half-open) as a standalone series.
    pub fn slice(&self, from: usize, to: usize) -> Result<ReturnSeries> {
        if from > to || to > self.len() {
            return Err(Error::InvalidConfig(format!(
                "return slice {from}..{to} out of range for {} stages",
                self.len()
            )));
        }
        ReturnSeries::new(
            self.dates[from..to].to_vec(),
            self.assets.clone(),
            self.rows[from..to].to_vec(),
        )
    }
}

/// A contiguous block of return rows handed to the solver: the empirical
/// distribution that assigns probability `1/M` to each of its `M` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnWindow {
    rows: Vec<Vec<f64>>,
}

impl ReturnWindow {
    /// Wraps `M >= 1` equally weighted return rows of equal length.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        let m = rows[0].len();
        if m == 0 {
            return Err(Error::InvalidConfig("return window needs at least one asset".into()));
        }
        for (k, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::MalformedRow {
                    line: k + 1,
                    reason: format!("expected {} returns, got {}", m, row.len()),
                });
            }
            for &x in row {
                if !x.is_finite() || x <= -1.0 {
                    return Err(Error::InvalidReturn { stage: k, value: x });
                }
            }
        }
        Ok(Self { rows })
    }

    /// Number of return rows `M`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn num_assets(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Probability weight of each row under the empirical distribution.
    pub fn row_weight(&self) -> f64 {
        1.0 / self.rows.len() as f64
    }
}

/// Reads a price CSV from any reader. See the module docs for the format.
///
/// Line numbers in errors are 1-based file lines (the header is line 1).
/// Blank lines are ignored wherever they appear.
pub fn load_price_csv<R: Read>(mut source: R) -> Result<PriceSeries> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    parse_price_csv(&text)
}

/// Opens `path` and reads it as a price CSV.
pub fn load_price_file<P: AsRef<Path>>(path: P) -> Result<PriceSeries> {
    load_price_csv(BufReader::new(File::open(path)?))
}

fn parse_price_csv(text: &str) -> Result<PriceSeries> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(idx, line)| (idx + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty());

    let (_, header) = lines.next().ok_or(Error::TooFewRows { needed: 3, got: 0 })?;
    let mut fields = header.split(',').map(str::trim);
    match fields.next() {
        Some("date") => {}
        _ => {
            return Err(Error::MalformedRow {
                line: 1,
                reason: "header must start with a 'date' column".into(),
            })
        }
    }
    let assets: Vec<String> = fields.map(str::to_owned).collect();
    if assets.is_empty() {
        return Err(Error::MalformedRow {
            line: 1,
            reason: "header lists no asset columns".into(),
        });
    }
    if let Some(blank) = assets.iter().position(String::is_empty) {
        return Err(Error::MalformedRow {
            line: 1,
            reason: format!("asset column {} has an empty name", blank + 2),
        });
    }

    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut prices: Vec<Vec<f64>> = Vec::new();
    for (line, row) in lines {
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != assets.len() + 1 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected {} columns, got {}", assets.len() + 1, fields.len()),
            });
        }
        let date = NaiveDate::parse_from_str(fields[0], "%Y-%m-%d").map_err(|e| Error::MalformedRow {
            line,
            reason: format!("unparsable date {:?}: {e}", fields[0]),
        })?;
        if let Some(&prev) = dates.last() {
            if date == prev {
                return Err(Error::DuplicateDate { line });
            }
            if date < prev {
                return Err(Error::UnsortedDates { line });
            }
        }
        let mut row_prices = Vec::with_capacity(assets.len());
        for (i, field) in fields[1..].iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::MalformedRow {
                line,
                reason: format!("unparsable number {:?} for asset {}", field, assets[i]),
            })?;
            if !value.is_finite() {
                return Err(Error::MalformedRow {
                    line,
                    reason: format!("non-finite price for asset {}", assets[i]),
                });
            }
            if value <= 0.0 {
                return Err(Error::NonPositivePrice {
                    line,
                    asset: assets[i].clone(),
                    value,
                });
            }
            row_prices.push(value);
        }
        dates.push(date);
        prices.push(row_prices);
    }

    if prices.len() < 2 {
        return Err(Error::TooFewRows { needed: 2, got: prices.len() });
    }
    PriceSeries::new(dates, assets, prices)
}

/// Turns `T` price rows into `T - 1` arithmetic return rows,
/// `x_i(k) = (s_i(k+1) - s_i(k)) / s_i(k)`, dated by stage `k`.
pub fn compute_returns(prices: &PriceSeries) -> ReturnSeries {
    let t = prices.len();
    let mut rows = Vec::with_capacity(t - 1);
    for k in 0..t - 1 {
        let today = prices.row(k);
        let next = prices.row(k + 1);
        let row: Vec<f64> = today
            .iter()
            .zip(next)
            .map(|(&s, &s_next)| (s_next - s) / s)
            .collect();
        rows.push(row);
    }
    ReturnSeries::new(prices.dates()[..t - 1].to_vec(), prices.assets().to_vec(), rows)
        .expect("returns from a valid price series are finite and > -1")
}

/// Reflects each asset's price path vertically inside its own range:
/// `s~_i(k) = (max_k s_i + min_k s_i) - s_i(k)`.
///
/// Rallies become crashes and vice versa while the per-asset min and max
/// are preserved, which makes this a useful stress transform: a strategy's
/// edge should not depend on the market trending in its favor. Applying
/// the transform twice restores the original series (up to float rounding).
pub fn flip_prices(prices: &PriceSeries) -> PriceSeries {
    let m = prices.num_assets();
    let mut pivots = Vec::with_capacity(m);
    for i in 0..m {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for row in prices.rows() {
            lo = lo.min(row[i]);
            hi = hi.max(row[i]);
        }
        pivots.push(hi + lo);
    }
    let flipped: Vec<Vec<f64>> = prices
        .rows()
        .iter()
        .map(|row| row.iter().zip(&pivots).map(|(&s, &c)| c - s).collect())
        .collect();
    PriceSeries::new(prices.dates().to_vec(), prices.assets().to_vec(), flipped)
        .expect("flip preserves the per-asset minimum, so prices stay positive")
}

/// The `M` return rows strictly before stage `k`: `x(k-M), ..., x(k-1)`.
///
/// This is the data a sliding-window strategy is allowed to see when it
/// picks the weight it will apply to `x(k)`, so `k` itself must be a valid
/// return stage: `M <= k <= len - 1`.
pub fn slice_window(returns: &ReturnSeries, k: usize, window: usize) -> Result<ReturnWindow> {
    if window == 0 {
        return Err(Error::InvalidConfig("window size must be at least 1".into()));
    }
    if k < window || k >= returns.len() {
        return Err(Error::WindowOutOfRange {
            stage: k,
            window,
            stages: returns.len(),
        });
    }
    ReturnWindow::new(returns.rows()[k - window..k].to_vec())
}

/// Appends a constant-return asset (a risk-free cash leg) to every stage.
///
/// The new column is named `CASH`, or `CASH_1`, `CASH_2`, ... if that name
/// is already taken. The rate must be strictly greater than -1.
pub fn append_cash_asset(returns: &ReturnSeries, rate: f64) -> Result<ReturnSeries> {
    if !rate.is_finite() || rate <= -1.0 {
        return Err(Error::InvalidConfig(format!(
            "cash rate must be finite and greater than -1, got {rate}"
        )));
    }
    let mut name = String::from("CASH");
    let mut suffix = 0;
    while returns.assets().iter().any(|a| *a == name) {
        suffix += 1;
        name = format!("CASH_{suffix}");
    }
    let mut assets = returns.assets().to_vec();
    assets.push(name);
    let rows: Vec<Vec<f64>> = returns
        .rows()
        .iter()
        .map(|row| {
            let mut row = row.clone();
            row.push(rate);
            row
        })
        .collect();
    ReturnSeries::new(returns.dates().to_vec(), assets, rows)
}
