//! Shared confidence-bound state: pooled empirical means over offline and
//! online samples, Hoeffding-style upper bounds, and running-max lower bounds.
//!
//! For an arm with `n = m + T` pooled samples the radius is
//! `sqrt(log_term / (2n))` with `log_term = log(K/delta)`. An arm with no
//! samples has an infinite radius: its upper bound is `+inf` and its lower
//! bound starts at `-inf`. These are genuine IEEE infinities, not finite
//! surrogates, so argmax semantics stay exact.
//!
//! The lower bound is a running maximum over time of `mean - radius`; it never
//! decreases, even when the radius in force changes between rounds.

use crate::error::{Error, Result};
use crate::offline::OfflineDataset;

/// Half-width of the confidence interval for `n` pooled samples.
///
/// Returns `+inf` for `n = 0`; errors when `log_term <= 0` or is not finite.
pub fn confidence_radius(log_term: f64, n: u64) -> Result<f64> {
    if !log_term.is_finite() || log_term <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "log term must be positive and finite, got {log_term}"
        )));
    }
    Ok(radius_unchecked(log_term, n))
}

#[inline]
fn radius_unchecked(log_term: f64, n: u64) -> f64 {
    if n == 0 {
        f64::INFINITY
    } else {
        (log_term / (2.0 * n as f64)).sqrt()
    }
}

/// Confidence-parameter schedule: either a fixed `delta` or `delta0 / t^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaSchedule {
    Fixed { delta: f64 },
    TimeVarying { delta0: f64 },
}

impl DeltaSchedule {
    pub fn fixed(delta: f64) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "delta must be in (0,1), got {delta}"
            )));
        }
        Ok(Self::Fixed { delta })
    }

    pub fn time_varying(delta0: f64) -> Result<Self> {
        if !delta0.is_finite() || delta0 <= 0.0 || delta0 >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "delta0 must be in (0,1), got {delta0}"
            )));
        }
        Ok(Self::TimeVarying { delta0 })
    }

    /// Confidence parameter in force at round `t >= 1`.
    pub fn delta_at(&self, t: u64) -> f64 {
        match *self {
            Self::Fixed { delta } => delta,
            Self::TimeVarying { delta0 } => delta0 / (t as f64 * t as f64),
        }
    }

    /// `log(K / delta_t)` for `K` arms at round `t >= 1`.
    pub fn log_term(&self, arms: usize, t: u64) -> f64 {
        (arms as f64 / self.delta_at(t)).ln()
    }
}

/// Per-arm online counts, pooled means and confidence bounds.
///
/// Single-writer: one state instance belongs to one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceState {
    offline_counts: Vec<u64>,
    online_counts: Vec<u64>,
    pooled_means: Vec<Option<f64>>,
    lower_running_max: Vec<f64>,
    log_term: f64,
}

impl ConfidenceState {
    /// Initialise from offline data. Sampled arms seed the running-max lower
    /// bound with `mean - radius` at their offline count; unsampled arms start
    /// at `-inf`.
    pub fn new(offline: &OfflineDataset, log_term: f64) -> Result<Self> {
        confidence_radius(log_term, 1)?; // validates log_term
        let k = offline.arm_count();
        let mut pooled_means = Vec::with_capacity(k);
        let mut lower = Vec::with_capacity(k);
        for arm in 0..k {
            let mean = offline.empirical_mean(arm);
            pooled_means.push(mean);
            lower.push(match mean {
                Some(m) => m - radius_unchecked(log_term, offline.count(arm)),
                None => f64::NEG_INFINITY,
            });
        }
        Ok(Self {
            offline_counts: offline.counts().to_vec(),
            online_counts: vec![0; k],
            pooled_means,
            lower_running_max: lower,
            log_term,
        })
    }

    pub fn arm_count(&self) -> usize {
        self.online_counts.len()
    }

    /// Online pull count of one arm.
    pub fn online_count(&self, arm: usize) -> u64 {
        self.online_counts[arm]
    }

    pub fn online_counts(&self) -> &[u64] {
        &self.online_counts
    }

    /// Total online pulls so far (equals the current round index).
    pub fn total_online(&self) -> u64 {
        self.online_counts.iter().sum()
    }

    /// Offline plus online samples for one arm.
    pub fn pooled_count(&self, arm: usize) -> u64 {
        self.offline_counts[arm] + self.online_counts[arm]
    }

    /// Pooled empirical mean; `None` while the arm has no samples.
    pub fn pooled_mean(&self, arm: usize) -> Option<f64> {
        self.pooled_means[arm]
    }

    /// `log(K/delta)` currently in force.
    pub fn log_term(&self) -> f64 {
        self.log_term
    }

    /// Replace the log term (used by the time-varying schedule each round).
    pub fn set_log_term(&mut self, log_term: f64) -> Result<()> {
        confidence_radius(log_term, 1)?;
        self.log_term = log_term;
        Ok(())
    }

    /// Upper confidence bound; `+inf` for an unsampled arm.
    pub fn upper_bound(&self, arm: usize) -> f64 {
        match self.pooled_means[arm] {
            Some(m) => m + radius_unchecked(self.log_term, self.pooled_count(arm)),
            None => f64::INFINITY,
        }
    }

    /// Running-max lower confidence bound; `-inf` until first sampled.
    pub fn lower_bound(&self, arm: usize) -> f64 {
        self.lower_running_max[arm]
    }

    pub fn upper_bounds(&self) -> Vec<f64> {
        (0..self.arm_count()).map(|i| self.upper_bound(i)).collect()
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower_running_max
    }

    /// Record one observed reward: bump the arm's online count, fold the
    /// reward into its pooled mean, and push a new running-max candidate at
    /// the log term currently in force. Other arms are untouched.
    pub fn update_after_pull(&mut self, arm: usize, reward: f64) -> Result<()> {
        if arm >= self.arm_count() {
            return Err(Error::ArmIndex {
                arm,
                arms: self.arm_count(),
            });
        }
        self.online_counts[arm] += 1;
        let n = self.pooled_count(arm);
        let mean = match self.pooled_means[arm] {
            Some(m) => m + (reward - m) / n as f64,
            None => reward,
        };
        self.pooled_means[arm] = Some(mean);
        let candidate = mean - radius_unchecked(self.log_term, n);
        if candidate > self.lower_running_max[arm] {
            self.lower_running_max[arm] = candidate;
        }
        Ok(())
    }
}
