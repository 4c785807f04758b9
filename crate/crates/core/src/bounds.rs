//! Numeric evaluators for the closed-form regret bounds of UCB, LCB and the
//! budget-gated policy, given per-arm offline counts.
//!
//! All evaluators are pure. Division by zero yields an explicit `+inf`
//! sentinel instead of an error so bound curves can be tabulated with gaps.
//! The two subset maximizations are solved exactly by scanning prefixes of
//! the counts sorted ascending: for a fixed subset size the objective
//! improves as the count sum shrinks, so some prefix attains the maximum.
//! Ties prefer the larger subset.

/// Result of a subset maximization: the maximal objective value and one
/// maximizing subset (original indices).
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetMax {
    pub value: f64,
    pub subset: Vec<usize>,
}

fn sorted_prefix_scan(counts: &[u64], objective: impl Fn(usize, u64) -> f64) -> SubsetMax {
    assert!(!counts.is_empty(), "need at least one arm");
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by_key(|&i| (counts[i], i));
    let mut best = f64::NEG_INFINITY;
    let mut best_len = 0;
    let mut sum = 0u64;
    for (len, &idx) in order.iter().enumerate() {
        sum += counts[idx];
        let value = objective(len + 1, sum);
        if value >= best {
            best = value;
            best_len = len + 1;
        }
    }
    let mut subset = order[..best_len].to_vec();
    subset.sort_unstable();
    SubsetMax {
        value: best,
        subset,
    }
}

/// Exploration-cost maximization `max over nonempty J of
/// 2 t sqrt(2 |J| log_term / (t + sum of counts in J)) + |J|`.
pub fn maximize_over_subsets(counts: &[u64], t: u64, log_term: f64) -> SubsetMax {
    sorted_prefix_scan(counts, |len, sum| {
        2.0 * t as f64 * (2.0 * len as f64 * log_term / (t as f64 + sum as f64)).sqrt()
            + len as f64
    })
}

/// Count-coverage maximization `max over nonempty J of
/// |J| / (t - 1 + sum of counts in J)`; `+inf` for a zero denominator.
pub fn maximize_count_ratio(counts: &[u64], t: u64) -> SubsetMax {
    sorted_prefix_scan(counts, |len, sum| {
        len as f64 / (t as f64 - 1.0 + sum as f64)
    })
}

/// Worst-case regret floor for any policy over horizon `t`:
/// `t/31 * sqrt(max count-coverage ratio)`.
pub fn minimax_lower_bound(counts: &[u64], t: u64) -> f64 {
    t as f64 * maximize_count_ratio(counts, t).value.sqrt() / 31.0
}

/// High-probability logging-regret ceiling of the budget-gated policy:
/// `t * (1 + (1 + [horizon unknown]) * alpha) * beta`.
pub fn oto_log_regret_bound(t: u64, alpha: f64, beta: f64, horizon_known: bool) -> f64 {
    let doubling = if horizon_known { 0.0 } else { 1.0 };
    t as f64 * (1.0 + (1.0 + doubling) * alpha) * beta
}

/// High-probability regret ceiling of the budget-gated policy against the
/// best arm. `+inf` when `alpha * beta` is zero.
pub fn oto_regret_bound(gaps: &[f64], counts: &[u64], delta: f64, alpha: f64, beta: f64) -> f64 {
    assert_eq!(gaps.len(), counts.len());
    let k = counts.len() as f64;
    let log_term = (k / delta).ln();
    if alpha * beta == 0.0 {
        return f64::INFINITY;
    }
    let clipped: f64 = gaps
        .iter()
        .zip(counts)
        .filter(|(gap, _)| **gap > 0.0)
        .map(|(&gap, &m)| gap * (4.0 * log_term / (gap * gap) - m as f64).max(0.0))
        .sum();
    clipped + 12.0 * k * log_term / (alpha * beta) + k
}

/// The two regret ceilings of warm-started UCB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UcbRegretBounds {
    /// Gap-dependent ceiling.
    pub instance: f64,
    /// Worst-case ceiling over all instances with these counts.
    pub minimax: f64,
}

pub fn ucb_regret_bounds(gaps: &[f64], counts: &[u64], delta: f64, t: u64) -> UcbRegretBounds {
    assert_eq!(gaps.len(), counts.len());
    let k = counts.len() as f64;
    let log_term = (k / delta).ln();
    let instance: f64 = gaps
        .iter()
        .zip(counts)
        .filter(|(gap, _)| **gap > 0.0)
        .map(|(&gap, &m)| gap * (2.0 * log_term / (gap * gap) - m as f64).max(0.0) + gap)
        .sum();
    let subset_branch = maximize_over_subsets(counts, t, log_term).value;
    let min_count = *counts.iter().min().expect("nonempty counts");
    let min_branch = if min_count == 0 {
        f64::INFINITY
    } else {
        t as f64 * (2.0 * log_term / min_count as f64).sqrt()
    };
    UcbRegretBounds {
        instance,
        minimax: subset_branch.min(min_branch) + 2.0 * (t * t) as f64 * delta,
    }
}

/// An upper and a lower limit on the same quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPair {
    pub upper: f64,
    pub lower: f64,
}

/// Worst-case regret of LCB over horizon `t`: fully driven by the least
/// covered arm. Upper limit is `+inf` when some arm has no offline samples.
pub fn lcb_bounds(counts: &[u64], delta: f64, t: u64) -> BoundPair {
    let k = counts.len() as f64;
    let log_term = (k / delta).ln();
    let min_count = *counts.iter().min().expect("nonempty counts") as f64;
    let upper = t as f64 * (2.0 * log_term / min_count).sqrt() + 2.0 * (t * t) as f64 * delta;
    let lower = (0.07 * t as f64).min(0.15 * t as f64 * (1.0 / min_count).sqrt());
    BoundPair { upper, lower }
}

/// Logging-regret floor of warm-started UCB, valid when `t` is a multiple of
/// the arm count; otherwise evaluated at the largest smaller multiple, which
/// is reported back.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UcbLogRegretLowerBound {
    pub value: f64,
    /// Horizon the bound was actually evaluated at.
    pub effective_t: u64,
}

pub fn ucb_log_regret_lower_bound(counts: &[u64], t: u64) -> UcbLogRegretLowerBound {
    let k = counts.len() as u64;
    let per_arm = t / k;
    let effective_t = per_arm * k;
    if effective_t == 0 {
        return UcbLogRegretLowerBound {
            value: 0.0,
            effective_t,
        };
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        // All counts equal, every bracket vanishes.
        return UcbLogRegretLowerBound {
            value: 0.0,
            effective_t,
        };
    }
    let max_count = *counts.iter().max().expect("nonempty counts");
    let reference = (1.0 / (2.0 * (max_count + per_arm) as f64)).sqrt();
    let value: f64 = counts
        .iter()
        .map(|&m| {
            let weight = 1.0 / k as f64 - m as f64 / total as f64;
            let bracket = (1.0 / (2.0 * (m + per_arm) as f64)).sqrt() - reference;
            weight * bracket
        })
        .sum::<f64>()
        * effective_t as f64;
    UcbLogRegretLowerBound { value, effective_t }
}

/// Logging-regret envelope of LCB: the upper limit scales with
/// `sum_i sqrt(m_i) / m`, the lower with the second-largest count.
pub fn lcb_log_regret_bounds(counts: &[u64], delta: f64, t: u64) -> BoundPair {
    let k = counts.len() as f64;
    let log_term = (k / delta).ln();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return BoundPair {
            upper: f64::INFINITY,
            lower: 0.0,
        };
    }
    let root_sum: f64 = counts.iter().map(|&m| (m as f64).sqrt()).sum();
    let upper = t as f64 * root_sum / total as f64 * (2.0 * log_term).sqrt()
        + 2.0 * (t * t) as f64 * delta;
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let second_largest = sorted.get(1).copied().unwrap_or(0);
    let lower = 0.15 * t as f64 * (second_largest as f64).sqrt() / total as f64;
    BoundPair { upper, lower }
}

/// Logging-regret envelope of warm-started UCB after a single round.
pub fn ucb_log_regret_t1_bounds(counts: &[u64], delta: f64) -> BoundPair {
    let k = counts.len() as f64;
    let log_term = (k / delta).ln();
    let min_count = *counts.iter().min().expect("nonempty counts") as f64;
    let upper = (2.0 * log_term / min_count).sqrt() + 2.0 * delta;
    let lower = 0.07 * 1.0_f64.min((1.0 / min_count).sqrt());
    BoundPair { upper, lower }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Independent oracle: enumerate every nonempty subset.
    fn brute_force(
        counts: &[u64],
        objective: impl Fn(usize, u64) -> f64,
    ) -> (f64, usize, u64) {
        let k = counts.len();
        assert!(k <= 16);
        let mut best = f64::NEG_INFINITY;
        let mut best_sig = (0usize, 0u64);
        for mask in 1u32..(1 << k) {
            let mut len = 0usize;
            let mut sum = 0u64;
            for (i, &c) in counts.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    len += 1;
                    sum += c;
                }
            }
            let value = objective(len, sum);
            if value > best || (value == best && len > best_sig.0) {
                best = value;
                best_sig = (len, sum);
            }
        }
        (best, best_sig.0, best_sig.1)
    }

    fn exploration_objective(t: u64, log_term: f64) -> impl Fn(usize, u64) -> f64 {
        move |len, sum| {
            2.0 * t as f64 * (2.0 * len as f64 * log_term / (t as f64 + sum as f64)).sqrt()
                + len as f64
        }
    }

    fn ratio_objective(t: u64) -> impl Fn(usize, u64) -> f64 {
        move |len, sum| len as f64 / (t as f64 - 1.0 + sum as f64)
    }

    #[test]
    fn subset_max_hand_value() {
        // counts (100, 0, 0), t = 2, log term 1: the zero-count pair wins
        // with value 4 sqrt(2) + 2.
        let got = maximize_over_subsets(&[100, 0, 0], 2, 1.0);
        let expected = 4.0 * 2.0_f64.sqrt() + 2.0;
        assert_eq!(got.value, expected);
        assert_eq!(got.subset, vec![1, 2]);
        assert!((got.value - 7.657).abs() < 1e-3);

        let (brute, len, sum) = brute_force(&[100, 0, 0], exploration_objective(2, 1.0));
        assert_eq!(got.value, brute);
        assert_eq!((got.subset.len(), 0u64), (len, sum));
    }

    #[test]
    fn subset_max_equal_counts_takes_all_arms() {
        let got = maximize_over_subsets(&[7, 7, 7, 7], 10, 1.5);
        assert_eq!(got.subset, vec![0, 1, 2, 3]);
    }

    #[test]
    fn minimax_lower_bound_hand_values() {
        let v = minimax_lower_bound(&[0, 0], 2);
        assert!((v - 2.0 * 2.0_f64.sqrt() / 31.0).abs() < 1e-15);

        // Degenerate denominator: single never-sampled arm at horizon one.
        assert_eq!(minimax_lower_bound(&[0], 1), f64::INFINITY);

        let v = minimax_lower_bound(&[5, 5], 6);
        assert!((v - 6.0 * (2.0f64 / 15.0).sqrt() / 31.0).abs() < 1e-15);
    }

    #[test]
    fn oto_log_regret_bound_values() {
        assert_eq!(oto_log_regret_bound(100, 0.5, 0.1, true), 15.0);
        // Indicator vanishes with alpha.
        assert_eq!(
            oto_log_regret_bound(50, 0.0, 0.3, true),
            oto_log_regret_bound(50, 0.0, 0.3, false)
        );
        assert!((oto_log_regret_bound(10, 1.0, 0.2, false) - 6.0).abs() < 1e-15);
    }

    #[test]
    fn oto_regret_bound_values() {
        // Single arm, gap 0.5, no offline samples, log term 1 (delta = 1/e),
        // alpha = beta = 1: 0.5 * 16 + 12 + 1 = 21.
        let delta = 1.0 / std::f64::consts::E;
        let v = oto_regret_bound(&[0.5], &[0], delta, 1.0, 1.0);
        assert!((v - 21.0).abs() < 1e-12);

        // Zero gaps leave only the budget-cost term.
        let v = oto_regret_bound(&[0.0, 0.0], &[3, 4], 0.1, 0.5, 0.2);
        let log_term = (2.0f64 / 0.1).ln();
        assert!((v - (12.0 * 2.0 * log_term / 0.1 + 2.0)).abs() < 1e-9);

        // Saturated counts clip the gap sum away.
        let log_term = 1.0f64;
        let m_big = (4.0 * log_term / 0.25).ceil() as u64;
        let v = oto_regret_bound(&[0.5, 0.0], &[m_big, 0], 2.0 / log_term.exp(), 1.0, 1.0);
        assert!((v - (12.0 * 2.0 * 1.0 + 2.0)).abs() < 1e-9);

        assert_eq!(
            oto_regret_bound(&[0.5], &[0], 0.1, 0.0, 1.0),
            f64::INFINITY
        );
    }

    #[test]
    fn ucb_regret_bound_values() {
        // Gap vector (0, 0.5), no samples, log term 1 (K = 2, delta = 2/e):
        // 0.5 * (2/0.25) + 0.5 = 4.5.
        let delta = 2.0 / std::f64::consts::E;
        let b = ucb_regret_bounds(&[0.0, 0.5], &[0, 0], delta, 1);
        assert!((b.instance - 4.5).abs() < 1e-12);

        // All gaps zero.
        let b = ucb_regret_bounds(&[0.0, 0.0], &[1, 1], 0.1, 5);
        assert_eq!(b.instance, 0.0);

        // Unsampled arm forces the subset branch of the minimax bound.
        let delta = 0.01;
        let log_term = (3.0f64 / delta).ln();
        let b = ucb_regret_bounds(&[0.0, 0.1, 0.2], &[4, 0, 9], delta, 7);
        let subset = maximize_over_subsets(&[4, 0, 9], 7, log_term).value;
        assert_eq!(b.minimax, subset + 2.0 * 49.0 * delta);
    }

    #[test]
    fn lcb_bound_values() {
        // min count 4, t = 10, log term 2 (K = 1, delta = e^-2):
        // upper = 10 * sqrt(4/4) + 200 delta.
        let delta = (-2.0f64).exp();
        let b = lcb_bounds(&[4], delta, 10);
        assert!((b.upper - (10.0 + 200.0 * delta)).abs() < 1e-12);

        // Uncovered arm: the time-linear branch of the lower limit.
        let b = lcb_bounds(&[0, 5], 0.1, 20);
        assert_eq!(b.lower, 0.07 * 20.0);
        assert_eq!(b.upper, f64::INFINITY);

        // min count 1, t = 1: min(0.07, 0.15) = 0.07.
        let b = lcb_bounds(&[1], 0.1, 1);
        assert!((b.lower - 0.07).abs() < 1e-15);
    }

    #[test]
    fn ucb_log_regret_lower_bound_values() {
        // Uniform counts: zero.
        let b = ucb_log_regret_lower_bound(&[25, 25, 25, 25], 100);
        assert_eq!(b.value, 0.0);
        assert_eq!(b.effective_t, 100);

        // Single arm: zero.
        let b = ucb_log_regret_lower_bound(&[10], 6);
        assert!(b.value.abs() < 1e-15);

        // Concentrated counts at K = 4, m = 100, T = 100: at least sqrt(KT)/10.
        let b = ucb_log_regret_lower_bound(&[100, 0, 0, 0], 100);
        assert!(b.value >= (4.0f64 * 100.0).sqrt() / 10.0, "value {}", b.value);

        // Non-multiple horizons round down and report it.
        let b = ucb_log_regret_lower_bound(&[100, 0, 0, 0], 103);
        assert_eq!(b.effective_t, 100);
        let b = ucb_log_regret_lower_bound(&[1, 2, 3], 2);
        assert_eq!(b.effective_t, 0);
        assert_eq!(b.value, 0.0);
    }

    #[test]
    fn lcb_log_regret_bound_values() {
        // counts (4, 4), t = 10, log term 2 (K = 2, delta = 2 e^-2):
        // upper = 10 * (4/8) * 2 + 200 delta = 10 + 200 delta.
        let delta = 2.0 * (-2.0f64).exp();
        let b = lcb_log_regret_bounds(&[4, 4], delta, 10);
        assert!((b.upper - (10.0 + 200.0 * delta)).abs() < 1e-12);
        // Second-largest count 4, total 8: 0.15 * 10 * 2 / 8.
        assert!((b.lower - 0.375).abs() < 1e-15);

        // All samples on one arm: lower limit vanishes.
        let b = lcb_log_regret_bounds(&[9, 0, 0], 0.1, 5);
        assert_eq!(b.lower, 0.0);

        // Uniform counts: leading upper term is t * sqrt(2 K log / m).
        let delta = 0.05;
        let b = lcb_log_regret_bounds(&[5, 5, 5, 5], delta, 8);
        let log_term = (4.0f64 / delta).ln();
        let lead = 8.0 * (2.0 * 4.0 * log_term / 20.0).sqrt();
        assert!((b.upper - (lead + 2.0 * 64.0 * delta)).abs() < 1e-9);
    }

    #[test]
    fn ucb_log_regret_t1_values() {
        let b = ucb_log_regret_t1_bounds(&[1, 3], 0.1);
        assert!((b.lower - 0.07).abs() < 1e-15);

        // Zero minimum clamps the lower limit at 0.07 and blows up the upper.
        let b = ucb_log_regret_t1_bounds(&[0, 3], 0.1);
        assert!((b.lower - 0.07).abs() < 1e-15);
        assert_eq!(b.upper, f64::INFINITY);

        // min count 4, log term 2 (K = 1, delta = e^-2): upper = 1 + 2 delta.
        let delta = (-2.0f64).exp();
        let b = ucb_log_regret_t1_bounds(&[4], delta);
        assert!((b.upper - (1.0 + 2.0 * delta)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn prefix_scan_matches_brute_force(
            counts in proptest::collection::vec(0u64..200, 1..9),
            t in 1u64..500,
            log_term in 0.05f64..10.0,
        ) {
            let got = maximize_over_subsets(&counts, t, log_term);
            let (brute, len, sum) = brute_force(&counts, exploration_objective(t, log_term));
            prop_assert_eq!(got.value, brute);
            let got_sum: u64 = got.subset.iter().map(|&i| counts[i]).sum();
            prop_assert_eq!((got.subset.len(), got_sum), (len, sum));

            let got = maximize_count_ratio(&counts, t);
            let (brute, len, sum) = brute_force(&counts, ratio_objective(t));
            prop_assert_eq!(got.value, brute);
            let got_sum: u64 = got.subset.iter().map(|&i| counts[i]).sum();
            prop_assert_eq!((got.subset.len(), got_sum), (len, sum));
        }

        #[test]
        fn oto_log_bound_monotone(
            t in 1u64..1000,
            alpha in 0.0f64..3.0,
            beta in 0.0f64..2.0,
        ) {
            let v = oto_log_regret_bound(t, alpha, beta, true);
            prop_assert!(oto_log_regret_bound(t + 1, alpha, beta, true) >= v);
            prop_assert!(oto_log_regret_bound(t, alpha + 0.1, beta, true) >= v);
            prop_assert!(oto_log_regret_bound(t, alpha, beta + 0.1, true) >= v);
            prop_assert!(oto_log_regret_bound(t, alpha, beta, false) >= v);
        }

        #[test]
        fn minimax_lower_bound_nonincreasing_in_counts(
            counts in proptest::collection::vec(0u64..50, 1..6),
            t in 1u64..200,
            bump in 0usize..6,
        ) {
            let base = minimax_lower_bound(&counts, t);
            let mut bumped = counts.clone();
            let idx = bump % counts.len();
            bumped[idx] += 1;
            prop_assert!(minimax_lower_bound(&bumped, t) <= base);
        }
    }
}
