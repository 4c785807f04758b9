//! Offline (logged) data: per-arm sample counts and their empirical means.
//!
//! Counts and means are all a learner needs from the logged interactions;
//! raw reward lists are never stored. The implied logging policy plays arm
//! `i` with probability `counts[i] / total`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::BanditInstance;

/// Per-arm offline sample counts `m_i` and empirical means.
///
/// The empirical mean of an arm is present iff its count is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineDataset {
    counts: Vec<u64>,
    empirical_means: Vec<Option<f64>>,
}

impl OfflineDataset {
    /// Build from explicit counts and means. `means[i]` must be `Some` iff
    /// `counts[i] > 0`.
    pub fn from_parts(counts: Vec<u64>, empirical_means: Vec<Option<f64>>) -> Result<Self> {
        if counts.len() != empirical_means.len() {
            return Err(Error::Config(format!(
                "counts has length {} but empirical means has length {}",
                counts.len(),
                empirical_means.len()
            )));
        }
        if counts.is_empty() {
            return Err(Error::InvalidParameter(
                "offline dataset needs at least one arm".into(),
            ));
        }
        for (i, (&c, m)) in counts.iter().zip(&empirical_means).enumerate() {
            match (c, m) {
                (0, Some(_)) => {
                    return Err(Error::Config(format!(
                        "arm {i} has no samples but an empirical mean"
                    )))
                }
                (n, None) if n > 0 => {
                    return Err(Error::Config(format!(
                        "arm {i} has {n} samples but no empirical mean"
                    )))
                }
                _ => {}
            }
        }
        Ok(Self {
            counts,
            empirical_means,
        })
    }

    /// A dataset with zero samples everywhere (pure online learning).
    pub fn empty(arms: usize) -> Result<Self> {
        Self::from_parts(vec![0; arms], vec![None; arms])
    }

    pub fn arm_count(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    /// Total number of offline samples across arms.
    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn empirical_mean(&self, arm: usize) -> Option<f64> {
        self.empirical_means[arm]
    }

    pub fn empirical_means(&self) -> &[Option<f64>] {
        &self.empirical_means
    }

    /// Logging-policy weights `counts[i] / total`; `None` when there is no
    /// offline data at all.
    pub fn logging_weights(&self) -> Option<Vec<f64>> {
        let total = self.total_count();
        if total == 0 {
            return None;
        }
        Some(
            self.counts
                .iter()
                .map(|&c| c as f64 / total as f64)
                .collect(),
        )
    }

    /// Count-weighted empirical mean of the logged rewards.
    pub fn empirical_logging_mean(&self) -> Option<f64> {
        let total = self.total_count();
        if total == 0 {
            return None;
        }
        let sum: f64 = self
            .counts
            .iter()
            .zip(&self.empirical_means)
            .map(|(&c, m)| c as f64 * m.unwrap_or(0.0))
            .sum();
        Some(sum / total as f64)
    }

    /// True mean of the logging policy under a known instance.
    pub fn logging_mean(&self, instance: &BanditInstance) -> Option<f64> {
        let total = self.total_count();
        if total == 0 {
            return None;
        }
        let sum: f64 = self
            .counts
            .iter()
            .zip(instance.means())
            .map(|(&c, mu)| c as f64 * mu)
            .sum();
        Some(sum / total as f64)
    }
}

/// Draw an offline dataset from a known instance: `counts[i]` i.i.d. rewards
/// per arm, keeping only the empirical means.
///
/// Each arm samples from its own RNG stream derived from `seed`, so the
/// result is independent of arm iteration order and thread count.
pub fn sample_offline(
    instance: &BanditInstance,
    counts: &[u64],
    seed: u64,
) -> Result<OfflineDataset> {
    if counts.len() != instance.arm_count() {
        return Err(Error::Config(format!(
            "counts has length {} but the instance has {} arms",
            counts.len(),
            instance.arm_count()
        )));
    }
    let mut means = Vec::with_capacity(counts.len());
    for (arm, &n) in counts.iter().enumerate() {
        if n == 0 {
            means.push(None);
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(arm as u64);
        let sum: f64 = (0..n).map(|_| instance.arm(arm).sample(&mut rng)).sum();
        means.push(Some(sum / n as f64));
    }
    OfflineDataset::from_parts(counts.to_vec(), means)
}
