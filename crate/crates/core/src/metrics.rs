//! Run-level measurements over recorded traces: success rate, normalized
//! corruption cost, cumulative regret, and the efficiency-based
//! hyperparameter selector.

use crate::{Error, Result};

/// One observed step: the queried point, its clean value, the corruption
/// and noise applied, and the resulting observation.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub t: usize,
    pub x: Vec<f64>,
    pub f_x: f64,
    pub c: f64,
    pub z: f64,
    pub y: f64,
    pub in_target: bool,
}

/// Full record of one run, including the range constants used for
/// normalization and the certified optimum used for regret.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub run_id: String,
    pub steps: Vec<TraceStep>,
    pub f_min: f64,
    pub f_max: f64,
    pub f_star: f64,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

fn check_prefix(trace: &RunTrace, t: usize) -> Result<()> {
    if t == 0 || t > trace.len() {
        return Err(Error::InvalidInput(format!(
            "step index {t} outside 1..={}",
            trace.len()
        )));
    }
    Ok(())
}

/// Fraction of the first `t` steps that landed in the target region.
pub fn success_rate(trace: &RunTrace, t: usize) -> Result<f64> {
    check_prefix(trace, t)?;
    let hits = trace.steps[..t].iter().filter(|s| s.in_target).count();
    Ok(hits as f64 / t as f64)
}

/// Cumulative corruption magnitude over the first `t` steps, normalized by
/// the objective's value range.
pub fn normalized_cost(trace: &RunTrace, t: usize) -> Result<f64> {
    check_prefix(trace, t)?;
    if !(trace.f_max > trace.f_min) {
        return Err(Error::InvalidInput(
            "cost normalization requires f_max > f_min".into(),
        ));
    }
    let total: f64 = trace.steps[..t].iter().map(|s| s.c.abs()).sum();
    Ok(total / (trace.f_max - trace.f_min))
}

/// Cumulative regret of the clean function values against the certified
/// optimum; insensitive to the corruption by definition.
pub fn cumulative_regret(trace: &RunTrace, t: usize) -> f64 {
    trace.steps[..t.min(trace.len())]
        .iter()
        .map(|s| trace.f_star - s.f_x)
        .sum()
}

/// One swept hyperparameter's end-of-run outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperparameterResult {
    pub theta: f64,
    pub success_rate: f64,
    pub normalized_cost: f64,
}

/// The hyperparameter maximizing success rate per unit of normalized cost.
///
/// Zero-cost entries with positive success rank above every finite ratio;
/// entries with neither success nor cost rank last. Ties break toward the
/// lowest hyperparameter value.
pub fn efficient_hyperparameter(results: &[HyperparameterResult]) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::InvalidInput("efficiency selection needs at least one entry".into()));
    }
    // Rank class 2: free success; 1: finite ratio; 0: inert entry.
    let key = |r: &HyperparameterResult| -> (u8, f64) {
        if r.normalized_cost == 0.0 {
            if r.success_rate > 0.0 {
                (2, r.success_rate)
            } else {
                (0, 0.0)
            }
        } else {
            (1, r.success_rate / r.normalized_cost)
        }
    };
    let mut best = &results[0];
    let mut best_key = key(best);
    for r in &results[1..] {
        let k = key(r);
        let better = k.0 > best_key.0
            || (k.0 == best_key.0 && k.1 > best_key.1)
            || (k.0 == best_key.0 && k.1 == best_key.1 && r.theta < best.theta);
        if better {
            best = r;
            best_key = k;
        }
    }
    Ok(best.theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(flags: &[bool], costs: &[f64], values: &[f64]) -> RunTrace {
        let steps = flags
            .iter()
            .zip(costs)
            .zip(values)
            .enumerate()
            .map(|(i, ((&hit, &c), &f))| TraceStep {
                t: i + 1,
                x: vec![0.0],
                f_x: f,
                c,
                z: 0.0,
                y: f + c,
                in_target: hit,
            })
            .collect();
        RunTrace {
            run_id: "test".into(),
            steps,
            f_min: -5.0,
            f_max: 5.0,
            f_star: 5.0,
        }
    }

    #[test]
    fn success_rate_counts_hits() {
        let t = trace(&[true; 10], &[0.0; 10], &[1.0; 10]);
        assert_eq!(success_rate(&t, 10).unwrap(), 1.0);

        let flags = [true, false, false, true, false, false, true, false, false, false];
        let t = trace(&flags, &[0.0; 10], &[1.0; 10]);
        assert_eq!(success_rate(&t, 10).unwrap(), 0.3);
    }

    #[test]
    fn success_rate_times_t_is_integral() {
        let flags = [true, false, true, true, false, true, false];
        let t = trace(&flags, &[0.0; 7], &[1.0; 7]);
        for i in 1..=7 {
            let v = success_rate(&t, i).unwrap() * i as f64;
            assert!((v - v.round()).abs() < 1e-12);
        }
    }

    #[test]
    fn step_zero_is_an_input_error() {
        let t = trace(&[true], &[0.0], &[1.0]);
        assert!(success_rate(&t, 0).is_err());
        assert!(success_rate(&t, 2).is_err());
    }

    #[test]
    fn normalized_cost_divides_by_the_range() {
        let t = trace(&[false; 3], &[1.0, -2.0, 3.0], &[0.0; 3]);
        assert_eq!(normalized_cost(&t, 3).unwrap(), 0.6);
        // Without corruption the cost is identically zero.
        let t = trace(&[false; 4], &[0.0; 4], &[0.0; 4]);
        for i in 1..=4 {
            assert_eq!(normalized_cost(&t, i).unwrap(), 0.0);
        }
    }

    #[test]
    fn normalized_cost_is_nondecreasing() {
        let t = trace(&[false; 5], &[0.5, -1.0, 0.0, 2.0, -0.25], &[0.0; 5]);
        let mut prev = 0.0;
        for i in 1..=5 {
            let v = normalized_cost(&t, i).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn degenerate_range_is_rejected() {
        let mut t = trace(&[false], &[1.0], &[0.0]);
        t.f_min = t.f_max;
        assert!(normalized_cost(&t, 1).is_err());
    }

    #[test]
    fn regret_accumulates_shortfalls() {
        let t = trace(&[false; 3], &[0.0; 3], &[5.0, 3.0, 5.0]);
        assert_eq!(cumulative_regret(&t, 1), 0.0);
        assert_eq!(cumulative_regret(&t, 2), 2.0);
        assert_eq!(cumulative_regret(&t, 3), 2.0);
    }

    #[test]
    fn regret_matches_a_running_sum_oracle_and_ignores_corruption() {
        let values = [1.0, -2.0, 4.5, 0.25, 3.0];
        let costs = [0.0, -3.0, -1.0, 0.0, -2.0];
        let t = trace(&[false; 5], &costs, &values);
        let mut acc = 0.0;
        for i in 1..=5 {
            acc += 5.0 - values[i - 1];
            assert!((cumulative_regret(&t, i) - acc).abs() < 1e-12);
        }
        let clean = trace(&[false; 5], &[0.0; 5], &values);
        assert_eq!(cumulative_regret(&t, 5), cumulative_regret(&clean, 5));
    }

    #[test]
    fn efficiency_prefers_the_best_ratio() {
        let entries = [
            HyperparameterResult { theta: 1.0, success_rate: 0.9, normalized_cost: 3.0 },
            HyperparameterResult { theta: 2.0, success_rate: 0.5, normalized_cost: 1.0 },
            HyperparameterResult { theta: 3.0, success_rate: 0.3, normalized_cost: 0.1 },
        ];
        assert_eq!(efficient_hyperparameter(&entries).unwrap(), 3.0);
    }

    #[test]
    fn efficiency_singleton_and_empty_cases() {
        let one = [HyperparameterResult { theta: 7.0, success_rate: 0.2, normalized_cost: 4.0 }];
        assert_eq!(efficient_hyperparameter(&one).unwrap(), 7.0);
        assert!(efficient_hyperparameter(&[]).is_err());
    }

    #[test]
    fn efficiency_zero_cost_rules() {
        // Free success beats any finite ratio.
        let entries = [
            HyperparameterResult { theta: 1.0, success_rate: 0.1, normalized_cost: 0.0 },
            HyperparameterResult { theta: 2.0, success_rate: 1.0, normalized_cost: 1e-6 },
        ];
        assert_eq!(efficient_hyperparameter(&entries).unwrap(), 1.0);
        // Inert entries rank last.
        let entries = [
            HyperparameterResult { theta: 1.0, success_rate: 0.0, normalized_cost: 0.0 },
            HyperparameterResult { theta: 2.0, success_rate: 0.0, normalized_cost: 5.0 },
        ];
        assert_eq!(efficient_hyperparameter(&entries).unwrap(), 2.0);
        // Ties break to the smallest hyperparameter.
        let entries = [
            HyperparameterResult { theta: 3.0, success_rate: 0.4, normalized_cost: 2.0 },
            HyperparameterResult { theta: 1.5, success_rate: 0.4, normalized_cost: 2.0 },
        ];
        assert_eq!(efficient_hyperparameter(&entries).unwrap(), 1.5);
    }
}
