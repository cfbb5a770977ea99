//! Log-optimal weight solver.
//!
//! Given a window of `M` return rows treated as an empirical distribution
//! with probability `1/M` each, find the long-only, fully invested weight
//! vector `K` maximizing the expected log-growth rate
//!
//! ```text
//! f(K) = (1/M) * sum_j log(1 + K'x(j))
//! ```
//!
//! over the unit simplex. The objective is concave, so projected gradient
//! ascent with a monotone line search converges to the global maximum, and
//! first-order information yields a computable optimality certificate: by
//! concavity, for any feasible K,
//!
//! ```text
//! f(K*) - f(K) <= max_i grad_i(K) - K'grad(K)
//! ```
//!
//! (the right-hand side linearizes f at K and maximizes over the simplex,
//! where linear functions peak at a vertex). The solver iterates until that
//! bound drops below the configured tolerance, so a result with
//! `converged = true` carries a proof of its own accuracy.
//!
//! Plain gradient steps crawl on ill-conditioned windows (nearly collinear
//! assets make the objective almost flat along a ridge), so each line
//! search starts from a spectral (Barzilai-Borwein) estimate of the local
//! curvature instead of a fixed step. Acceptance is still monotone and
//! every operation is sequential, so results stay bit-for-bit reproducible.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::market_data::ReturnWindow;

/// Tolerance on `sum(weights) == 1` for a valid [`WeightVector`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Bounds on the spectral step estimate, so a degenerate curvature sample
/// cannot produce a zero or non-finite trial step.
const SPECTRAL_STEP_MIN: f64 = 1e-12;
const SPECTRAL_STEP_MAX: f64 = 1e10;

/// Give up shrinking the line-search step below this; at that scale the
/// projected point no longer moves in double precision.
const STEP_FLOOR: f64 = 1e-20;

/// A point on the unit simplex: entries in `[0, 1]` summing to 1 within
/// [`WEIGHT_SUM_TOLERANCE`]. Encodes a long-only, fully invested portfolio.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    /// Validates and wraps a raw weight vector.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidConfig("weight vector must not be empty".into()));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidConfig(format!(
                    "weight {w} at index {i} is outside [0, 1]"
                )));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidConfig(format!(
                "weights sum to {sum}, expected 1 within {WEIGHT_SUM_TOLERANCE:e}"
            )));
        }
        Ok(Self { weights })
    }

    /// The uniform portfolio `(1/m, ..., 1/m)`.
    pub fn uniform(m: usize) -> Self {
        assert!(m >= 1, "cannot build a weight vector over zero assets");
        Self { weights: vec![1.0 / m as f64; m] }
    }

    /// The single-asset portfolio `e_i`.
    pub fn vertex(m: usize, i: usize) -> Self {
        assert!(i < m, "vertex index {i} out of range for {m} assets");
        let mut weights = vec![0.0; m];
        weights[i] = 1.0;
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Wraps output of the projection, which is feasible by construction.
    fn from_projection(weights: Vec<f64>) -> Self {
        debug_assert!({
            let sum: f64 = weights.iter().sum();
            (sum - 1.0).abs() <= WEIGHT_SUM_TOLERANCE
                && weights.iter().all(|w| (0.0..=1.0).contains(w))
        });
        Self { weights }
    }
}

/// Tuning knobs for [`solve_log_optimal`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Stop once the certified suboptimality bound is at most this.
    pub gap_tolerance: f64,
    /// Hard cap on accepted ascent steps before giving up.
    pub max_iterations: usize,
    /// Multiplier applied to the step size when a trial is rejected.
    pub shrink: f64,
    /// Step size each line search falls back to when no curvature
    /// estimate is available.
    pub initial_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gap_tolerance: 1e-9,
            max_iterations: 10_000,
            shrink: 0.5,
            initial_step: 1.0,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !self.gap_tolerance.is_finite() || self.gap_tolerance < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "gap tolerance must be finite and non-negative, got {}",
                self.gap_tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "shrink factor must lie in (0, 1), got {}",
                self.shrink
            )));
        }
        if !self.initial_step.is_finite() || self.initial_step <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "initial step must be finite and positive, got {}",
                self.initial_step
            )));
        }
        Ok(())
    }
}

/// Outcome of one solve: the weights, their objective value, the certified
/// optimality gap, and how much work it took.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub weights: WeightVector,
    /// Objective value `f(weights)` on the window.
    pub objective: f64,
    /// Certified upper bound on `f(K*) - f(weights)`; non-negative.
    pub gap: f64,
    /// Accepted ascent steps performed.
    pub iterations: usize,
    /// Whether `gap <= gap_tolerance` was reached within budget.
    pub converged: bool,
}

fn check_dimensions(weights: &WeightVector, window: &ReturnWindow) -> Result<()> {
    if weights.len() != window.num_assets() {
        return Err(Error::DimensionMismatch {
            expected: window.num_assets(),
            got: weights.len(),
        });
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Empirical log-growth rate `(1/M) * sum_j log(1 + K'x(j))`.
///
/// Fails with [`Error::NonViableReturn`] if any row would wipe out the
/// portfolio (`1 + K'x(j) <= 0`), where the log is undefined.
pub fn log_growth_objective(weights: &WeightVector, window: &ReturnWindow) -> Result<f64> {
    check_dimensions(weights, window)?;
    let mut total = 0.0;
    for (j, row) in window.rows().iter().enumerate() {
        let ret = dot(weights.weights(), row);
        if ret <= -1.0 {
            return Err(Error::NonViableReturn { stage: j, gross: 1.0 + ret });
        }
        total += ret.ln_1p();
    }
    Ok(total / window.len() as f64)
}

/// Gradient of the objective: `grad_i = (1/M) * sum_j x_i(j) / (1 + K'x(j))`.
pub fn log_growth_gradient(weights: &WeightVector, window: &ReturnWindow) -> Result<Vec<f64>> {
    check_dimensions(weights, window)?;
    let m = window.num_assets();
    let mut grad = vec![0.0; m];
    for (j, row) in window.rows().iter().enumerate() {
        let gross = 1.0 + dot(weights.weights(), row);
        if gross <= 0.0 {
            return Err(Error::NonViableReturn { stage: j, gross });
        }
        for i in 0..m {
            grad[i] += row[i] / gross;
        }
    }
    let scale = window.row_weight();
    for g in &mut grad {
        *g *= scale;
    }
    Ok(grad)
}

/// Euclidean projection onto the unit simplex, by the sort-and-threshold
/// method: find the largest prefix of the descending sort whose running
/// average (shifted to sum to 1) stays below its entries; subtracting that
/// threshold and clipping at zero is the closest feasible point.
pub fn project_to_simplex(point: &[f64]) -> WeightVector {
    assert!(!point.is_empty(), "cannot project an empty vector");
    let mut sorted = point.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("projection input must not contain NaN"));

    let mut prefix_sum = 0.0;
    let mut threshold = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        prefix_sum += u;
        let candidate = (prefix_sum - 1.0) / (j + 1) as f64;
        if u > candidate {
            threshold = candidate;
        } else {
            break;
        }
    }

    let mut weights: Vec<f64> = point.iter().map(|&v| (v - threshold).max(0.0)).collect();
    // Renormalize away the last few ulps so the sum invariant holds even
    // after projecting points far outside the simplex.
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w = (*w / total).min(1.0);
    }
    WeightVector::from_projection(weights)
}

/// Certified bound on the suboptimality of `weights`:
/// `max_i grad_i - K'grad`, clipped at zero against rounding.
pub fn optimality_gap(weights: &WeightVector, window: &ReturnWindow) -> Result<f64> {
    let grad = log_growth_gradient(weights, window)?;
    Ok(gap_from_gradient(weights, &grad))
}

fn gap_from_gradient(weights: &WeightVector, grad: &[f64]) -> f64 {
    let best = grad.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (best - dot(weights.weights(), grad)).max(0.0)
}

fn project_step(weights: &WeightVector, grad: &[f64], step: f64) -> WeightVector {
    let moved: Vec<f64> = weights
        .weights()
        .iter()
        .zip(grad)
        .map(|(&w, &g)| w + step * g)
        .collect();
    project_to_simplex(&moved)
}

/// Maximizes the log-growth rate over the simplex by projected gradient
/// ascent, starting from the uniform portfolio.
///
/// Each iteration projects a gradient step and backtracks (multiplying the
/// step by `shrink`) until the objective does not decrease; the trial step
/// for the next iteration comes from a spectral curvature estimate. The
/// loop exits as soon as the optimality gap is within tolerance.
///
/// Returns [`Error::DidNotConverge`] — carrying the best iterate seen — if
/// the budget runs out first, and [`Error::NonViableReturn`] if even the
/// uniform portfolio has undefined objective on this window.
pub fn solve_log_optimal(window: &ReturnWindow, config: &SolverConfig) -> Result<SolveResult> {
    solve_with_trace(window, config, &mut None)
}

/// Same as [`solve_log_optimal`], optionally recording the objective value
/// of every accepted iterate (starting point included). Kept private: the
/// trace exists so tests can check the ascent is monotone.
fn solve_with_trace(
    window: &ReturnWindow,
    config: &SolverConfig,
    trace: &mut Option<Vec<f64>>,
) -> Result<SolveResult> {
    config.validate()?;

    let mut weights = WeightVector::uniform(window.num_assets());
    let mut objective = log_growth_objective(&weights, window)?;
    let mut grad = log_growth_gradient(&weights, window)?;
    let mut trial_step = config.initial_step;

    let mut iterations = 0;
    let mut best: Option<SolveResult> = None;
    if let Some(trace) = trace.as_mut() {
        trace.push(objective);
    }

    loop {
        let gap = gap_from_gradient(&weights, &grad);
        if best.as_ref().map_or(true, |b| gap < b.gap) {
            best = Some(SolveResult {
                weights: weights.clone(),
                objective,
                gap,
                iterations,
                converged: false,
            });
        }
        if gap <= config.gap_tolerance {
            return Ok(SolveResult { weights, objective, gap, iterations, converged: true });
        }
        if iterations >= config.max_iterations {
            break;
        }

        // Backtracking line search: shrink until the step stops hurting.
        let mut step = trial_step;
        let mut accepted = None;
        loop {
            let candidate = project_step(&weights, &grad, step);
            if candidate.weights() == weights.weights() {
                // The projected point no longer moves; smaller steps move
                // even less, so the search is stuck.
                break;
            }
            let candidate_objective = log_growth_objective(&candidate, window)?;
            if candidate_objective >= objective {
                accepted = Some((candidate, candidate_objective));
                break;
            }
            step *= config.shrink;
            if step < STEP_FLOOR {
                break;
            }
        }
        let Some((next, next_objective)) = accepted else {
            break;
        };

        let next_grad = log_growth_gradient(&next, window)?;

        // Spectral (Barzilai-Borwein) step: s's / -(s'y) approximates the
        // inverse curvature along the step just taken. For a concave
        // objective -(s'y) >= 0; guard anyway and fall back to the
        // configured step when the sample is degenerate.
        let mut s_dot_s = 0.0;
        let mut s_dot_y = 0.0;
        for i in 0..weights.len() {
            let s = next.weights()[i] - weights.weights()[i];
            let y = next_grad[i] - grad[i];
            s_dot_s += s * s;
            s_dot_y += s * y;
        }
        trial_step = if s_dot_y < 0.0 && s_dot_s > 0.0 {
            (s_dot_s / -s_dot_y).clamp(SPECTRAL_STEP_MIN, SPECTRAL_STEP_MAX)
        } else {
            config.initial_step
        };

        weights = next;
        objective = next_objective;
        grad = next_grad;
        iterations += 1;
        if let Some(trace) = trace.as_mut() {
            trace.push(objective);
        }
    }

    let best = best.expect("loop records an iterate before exiting");
    Err(Error::DidNotConverge {
        stage: None,
        gap: best.gap,
        iterations: best.iterations,
        best: Box::new(best),
    })
}
