//! Weight schedules: who holds what at each stage.
//!
//! A [`WeightSchedule`] assigns a weight vector to a contiguous range of
//! return stages; the vector scheduled for stage `k` is applied to the
//! realized return `x(k)`. Two producers are provided, matching the two
//! strategies under study:
//!
//! * [`sliding_window_weights`] re-solves the log-optimal problem at every
//!   stage on the trailing `M` return rows (data-driven, adapts to regime
//!   changes at the cost of `T - M` solves), and
//! * [`classical_log_optimal`] solves once over the whole history
//!   (the returns are treated as i.i.d. draws from one distribution).
//!
//! [`constant_schedule`] turns any fixed vector into a schedule, which is
//! how buy-side baselines (uniform, single asset, classical) enter the
//! backtest on equal footing.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::market_data::{slice_window, ReturnSeries, ReturnWindow};
use crate::solver::{solve_log_optimal, SolverConfig, WeightVector};

/// One scheduled stage: the weights to hold plus the solver certificate
/// they came with (`gap = 0`, `iterations = 0` for fixed weights).
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEntry {
    pub weights: WeightVector,
    /// Certified optimality gap of the solve that produced these weights.
    pub gap: f64,
    /// Ascent iterations that solve took.
    pub iterations: usize,
}

/// Weights for the contiguous stage range `start_stage..=start_stage + len - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSchedule {
    start_stage: usize,
    entries: Vec<ScheduleEntry>,
}

impl WeightSchedule {
    /// Wraps a non-empty list of entries starting at `start_stage`; every
    /// entry must cover the same number of assets.
    pub fn new(start_stage: usize, entries: Vec<ScheduleEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidConfig("weight schedule must not be empty".into()));
        }
        let m = entries[0].weights.len();
        if let Some(bad) = entries.iter().find(|e| e.weights.len() != m) {
            return Err(Error::DimensionMismatch { expected: m, got: bad.weights.len() });
        }
        Ok(Self { start_stage, entries })
    }

    /// First stage the schedule covers.
    pub fn start_stage(&self) -> usize {
        self.start_stage
    }

    /// Last stage the schedule covers (inclusive).
    pub fn end_stage(&self) -> usize {
        self.start_stage + self.entries.len() - 1
    }

    /// Number of scheduled stages.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn num_assets(&self) -> usize {
        self.entries[0].weights.len()
    }

    pub fn entries(&self) -> &[ScheduleEntry] {
        &self.entries
    }

    /// Entry scheduled for absolute stage `k`, if covered.
    pub fn entry_at(&self, k: usize) -> Option<&ScheduleEntry> {
        k.checked_sub(self.start_stage).and_then(|off| self.entries.get(off))
    }

    /// Same entries relabeled to start at `new_start`. Used to line up a
    /// schedule computed on a trimmed series with absolute stage numbers.
    pub fn rebased(self, new_start: usize) -> Self {
        Self { start_stage: new_start, entries: self.entries }
    }

    /// Keeps only the entries for stages `from..=self.end_stage()`.
    pub fn truncated_front(self, from: usize) -> Result<Self> {
        if from < self.start_stage || from > self.end_stage() {
            return Err(Error::InvalidConfig(format!(
                "cannot truncate schedule covering {}..={} to start at {from}",
                self.start_stage,
                self.end_stage()
            )));
        }
        let offset = from - self.start_stage;
        Self::new(from, self.entries[offset..].to_vec())
    }
}

/// Solves the log-optimal problem at every stage `k` in `M..len` on the
/// window of the `M` return rows before `k`, in parallel.
///
/// The schedule starts at stage `M` (the first stage with enough history)
/// and ends at the last return stage. Parallelism does not affect the
/// result: each stage's solve is independent and deterministic, and the
/// entries are collected in stage order. If any stage fails, the error for
/// the smallest such stage is returned (with the stage attached).
pub fn sliding_window_weights(
    returns: &ReturnSeries,
    window: usize,
    config: &SolverConfig,
) -> Result<WeightSchedule> {
    if window == 0 {
        return Err(Error::InvalidConfig("window size must be at least 1".into()));
    }
    let stages = returns.len();
    if stages < window + 1 {
        return Err(Error::InsufficientData { needed: window + 1, got: stages });
    }

    let solves: Vec<Result<ScheduleEntry>> = (window..stages)
        .into_par_iter()
        .map(|k| {
            let data = slice_window(returns, k, window)?;
            let result = solve_log_optimal(&data, config).map_err(|e| tag_stage(e, k))?;
            Ok(ScheduleEntry {
                weights: result.weights,
                gap: result.gap,
                iterations: result.iterations,
            })
        })
        .collect();

    let mut entries = Vec::with_capacity(solves.len());
    for solve in solves {
        entries.push(solve?);
    }
    WeightSchedule::new(window, entries)
}

fn tag_stage(err: Error, k: usize) -> Error {
    match err {
        Error::DidNotConverge { stage: None, gap, iterations, best } => {
            Error::DidNotConverge { stage: Some(k), gap, iterations, best }
        }
        other => other,
    }
}

/// Solves the log-optimal problem once over every return row of `returns`,
/// treating the full history as one empirical distribution.
pub fn classical_log_optimal(returns: &ReturnSeries, config: &SolverConfig) -> Result<WeightVector> {
    if returns.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let window = ReturnWindow::new(returns.rows().to_vec())?;
    Ok(solve_log_optimal(&window, config)?.weights)
}

/// Schedule that holds the same `weights` for `length` stages starting at
/// `start_stage`. Entries carry `gap = 0` and `iterations = 0`.
pub fn constant_schedule(weights: &WeightVector, start_stage: usize, length: usize) -> Result<WeightSchedule> {
    if length == 0 {
        return Err(Error::InvalidConfig("constant schedule needs at least one stage".into()));
    }
    let entry = ScheduleEntry { weights: weights.clone(), gap: 0.0, iterations: 0 };
    WeightSchedule::new(start_stage, vec![entry; length])
}
