//! Randomized cross-module properties: invariants that must hold for any
//! well-formed input, checked with proptest.

use chrono::NaiveDate;
use logopt::{
    compute_returns, flip_prices, max_drawdown, simulate, sliding_window_weights,
    solve_log_optimal, summarize, EquityCurve, PriceSeries, ReturnSeries, ReturnWindow,
    SolverConfig, WeightVector,
};
use proptest::prelude::*;

fn dates(n: usize) -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(2019, 1, 1).unwrap();
    (0..n).map(|k| start + chrono::Days::new(k as u64)).collect()
}

fn price_series(rows: Vec<Vec<f64>>) -> PriceSeries {
    let assets = (0..rows[0].len()).map(|i| format!("A{i}")).collect();
    PriceSeries::new(dates(rows.len()), assets, rows).unwrap()
}

fn return_series(rows: Vec<Vec<f64>>) -> ReturnSeries {
    let assets = (0..rows[0].len()).map(|i| format!("A{i}")).collect();
    ReturnSeries::new(dates(rows.len()), assets, rows).unwrap()
}

/// Rectangular price grids: 3..=12 rows over 1..=3 assets, prices well
/// inside the positive range.
fn price_grid() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..=3).prop_flat_map(|m| {
        proptest::collection::vec(proptest::collection::vec(0.5..150.0f64, m), 3..=12)
    })
}

/// Return grids with entries safely above -1.
fn return_grid() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..=3).prop_flat_map(|m| {
        proptest::collection::vec(proptest::collection::vec(-0.5..0.8f64, m), 1..=8)
    })
}

proptest! {
    #[test]
    fn flip_twice_restores_prices(rows in price_grid()) {
        let p = price_series(rows);
        let back = flip_prices(&flip_prices(&p));
        for (orig, twice) in p.rows().iter().zip(back.rows()) {
            for (a, b) in orig.iter().zip(twice) {
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn flip_preserves_per_asset_range(rows in price_grid()) {
        let p = price_series(rows);
        let f = flip_prices(&p);
        for i in 0..p.num_assets() {
            let column = |s: &PriceSeries| -> (f64, f64) {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for row in s.rows() {
                    lo = lo.min(row[i]);
                    hi = hi.max(row[i]);
                }
                (lo, hi)
            };
            let (lo, hi) = column(&p);
            let (flo, fhi) = column(&f);
            prop_assert!((lo - flo).abs() <= 1e-9 * hi);
            prop_assert!((hi - fhi).abs() <= 1e-9 * hi);
        }
    }

    #[test]
    fn single_asset_schedule_telescopes_to_buy_and_hold(rows in price_grid(), v0 in 0.1..100.0f64) {
        // Holding asset i at every stage must reproduce the price ratio:
        // the compounded per-period returns telescope to p_end / p_start.
        let p = price_series(rows);
        let returns = compute_returns(&p);
        for i in 0..p.num_assets() {
            let hold = logopt::constant_schedule(
                &WeightVector::vertex(p.num_assets(), i),
                0,
                returns.len(),
            )
            .unwrap();
            let curve = simulate(&returns, &hold, v0).unwrap();
            let expected = v0 * p.rows()[p.len() - 1][i] / p.rows()[0][i];
            prop_assert!(
                (curve.final_value() - expected).abs() <= 1e-10 * expected,
                "asset {i}: {} vs {expected}",
                curve.final_value()
            );
        }
    }

    #[test]
    fn drawdown_matches_quadratic_brute_force(values in proptest::collection::vec(0.05..20.0f64, 2..40)) {
        let curve = EquityCurve::new(0, values.clone()).unwrap();
        let fast = max_drawdown(&curve).unwrap();
        let mut slow = 0.0f64;
        for l in 0..values.len() {
            for k in l..values.len() {
                slow = slow.max((values[l] - values[k]) / values[l]);
            }
        }
        prop_assert!((fast - slow).abs() <= 1e-12, "fast {fast} vs brute force {slow}");
    }

    #[test]
    fn metrics_are_scale_invariant(values in proptest::collection::vec(0.05..20.0f64, 3..30), scale in 0.01..500.0f64) {
        let a = summarize(&EquityCurve::new(0, values.clone()).unwrap(), 0.0001);
        let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
        let b = summarize(&EquityCurve::new(0, scaled).unwrap(), 0.0001);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert!((a.cumulative_return - b.cumulative_return).abs() <= 1e-9 * (1.0 + a.cumulative_return.abs()));
                prop_assert!((a.max_drawdown - b.max_drawdown).abs() <= 1e-9);
                prop_assert!((a.sharpe_per_period - b.sharpe_per_period).abs() <= 1e-6 * (1.0 + a.sharpe_per_period.abs()));
            }
            // Degenerate volatility must be degenerate at every scale.
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "scale changed the outcome: {a:?} vs {b:?}"),
        }
    }

    #[test]
    fn solve_is_bitwise_deterministic(rows in return_grid()) {
        let window = ReturnWindow::new(rows).unwrap();
        let config = SolverConfig::default();
        let a = solve_log_optimal(&window, &config);
        let b = solve_log_optimal(&window, &config);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.objective.to_bits(), b.objective.to_bits());
                prop_assert_eq!(a.gap.to_bits(), b.gap.to_bits());
                prop_assert_eq!(a.iterations, b.iterations);
                let wa: Vec<u64> = a.weights.weights().iter().map(|w| w.to_bits()).collect();
                let wb: Vec<u64> = b.weights.weights().iter().map(|w| w.to_bits()).collect();
                prop_assert_eq!(wa, wb);
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "one run failed: {a:?} vs {b:?}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sliding_schedule_ignores_future_returns(
        rows in proptest::collection::vec(proptest::collection::vec(-0.3..0.5f64, 2), 5..=10),
        bump in 0.01..0.4f64,
    ) {
        // Perturbing the return at stage j must not change any scheduled
        // weight for stages at or before j: those solves only ever see
        // strictly earlier rows.
        let window = 2usize;
        let j = rows.len() - 1;
        let mut future = rows.clone();
        future[j][0] += bump;
        future[j][1] -= bump / 2.0;

        let config = SolverConfig::default();
        let a = sliding_window_weights(&return_series(rows), window, &config).unwrap();
        let b = sliding_window_weights(&return_series(future), window, &config).unwrap();
        for k in window..=j {
            let wa = a.entry_at(k).unwrap();
            let wb = b.entry_at(k).unwrap();
            prop_assert_eq!(&wa.weights, &wb.weights, "stage {} leaked the future", k);
            prop_assert_eq!(wa.iterations, wb.iterations);
        }
    }

    #[test]
    fn parallel_rolling_solves_are_reproducible(
        rows in proptest::collection::vec(proptest::collection::vec(-0.2..0.3f64, 2), 6..=10),
    ) {
        let r = return_series(rows);
        let config = SolverConfig::default();
        let a = sliding_window_weights(&r, 3, &config).unwrap();
        let b = sliding_window_weights(&r, 3, &config).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (ea, eb) in a.entries().iter().zip(b.entries()) {
            let wa: Vec<u64> = ea.weights.weights().iter().map(|w| w.to_bits()).collect();
            let wb: Vec<u64> = eb.weights.weights().iter().map(|w| w.to_bits()).collect();
            prop_assert_eq!(wa, wb);
            prop_assert_eq!(ea.gap.to_bits(), eb.gap.to_bits());
            prop_assert_eq!(ea.iterations, eb.iterations);
        }
    }
}
