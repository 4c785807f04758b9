//! Bandit instances: arm reward distributions and the ground-truth quantities
//! (best mean, per-arm gaps) that regret accounting is measured against.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Reward distribution of a single arm. All true means live in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum ArmDistribution {
    /// Bernoulli rewards in `{0, 1}` with the given success probability.
    Bernoulli { mean: f64 },
    /// Gaussian rewards with mean in `[0, 1]` and a positive standard deviation.
    Gaussian { mean: f64, stddev: f64 },
    /// A constant reward, useful for worst-case constructions.
    Deterministic { value: f64 },
}

impl ArmDistribution {
    pub fn bernoulli(mean: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mean) {
            return Err(Error::InvalidParameter(format!(
                "Bernoulli mean must be in [0,1], got {mean}"
            )));
        }
        Ok(Self::Bernoulli { mean })
    }

    pub fn gaussian(mean: f64, stddev: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mean) {
            return Err(Error::InvalidParameter(format!(
                "Gaussian mean must be in [0,1], got {mean}"
            )));
        }
        if !stddev.is_finite() || stddev <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Gaussian stddev must be positive and finite, got {stddev}"
            )));
        }
        Ok(Self::Gaussian { mean, stddev })
    }

    pub fn deterministic(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidParameter(format!(
                "Deterministic value must be in [0,1], got {value}"
            )));
        }
        Ok(Self::Deterministic { value })
    }

    /// True mean of the distribution.
    pub fn mean(&self) -> f64 {
        match *self {
            Self::Bernoulli { mean } => mean,
            Self::Gaussian { mean, .. } => mean,
            Self::Deterministic { value } => value,
        }
    }

    /// Draw one reward. Reproducible bit-for-bit for a given RNG state.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Bernoulli { mean } => {
                if rng.random_bool(mean) {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Gaussian { mean, stddev } => {
                // Parameters were validated at construction.
                Normal::new(mean, stddev).expect("validated stddev").sample(rng)
            }
            Self::Deterministic { value } => value,
        }
    }
}

/// An ordered collection of arms; the unknown environment the learner faces.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditInstance {
    arms: Vec<ArmDistribution>,
}

impl BanditInstance {
    pub fn new(arms: Vec<ArmDistribution>) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::InvalidParameter(
                "a bandit instance needs at least one arm".into(),
            ));
        }
        Ok(Self { arms })
    }

    pub fn arm_count(&self) -> usize {
        self.arms.len()
    }

    pub fn arm(&self, index: usize) -> &ArmDistribution {
        &self.arms[index]
    }

    pub fn arms(&self) -> &[ArmDistribution] {
        &self.arms
    }

    pub fn means(&self) -> Vec<f64> {
        self.arms.iter().map(ArmDistribution::mean).collect()
    }

    /// Largest true mean over all arms.
    pub fn best_mean(&self) -> f64 {
        self.arms
            .iter()
            .map(ArmDistribution::mean)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Suboptimality gap of every arm: best mean minus the arm's mean.
    pub fn gaps(&self) -> Vec<f64> {
        let best = self.best_mean();
        self.arms.iter().map(|a| best - a.mean()).collect()
    }
}
