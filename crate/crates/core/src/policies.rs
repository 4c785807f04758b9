//! The three policies: UCB (optimism), LCB (pessimism), and OtO, the
//! budget-gated policy that interpolates between them.
//!
//! OtO keeps a per-round exploration budget. Each round it proposes the UCB
//! arm; if the budget is strictly positive the proposal is played, otherwise
//! the policy falls back to the LCB arm. The budget compares a safe benchmark
//! `gamma` (a lower confidence bound on the logging policy's value, minus a
//! slack `alpha * beta`) against running lower-bound estimates of the reward
//! already collected on exploratory rounds, plus the slack still expected
//! from future pessimistic rounds up to the (possibly proxy) horizon.
//!
//! `beta` scales with the offline-data uncertainty: `(sum_i sqrt(m_i) / m) *
//! sqrt(2 log(K/delta))`. With no offline data there is no logging policy to
//! protect, and the policy degenerates to plain UCB.

use crate::confidence::ConfidenceState;
use crate::error::{Error, Result};
use crate::offline::OfflineDataset;

/// Which arm source a round was played from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Ucb,
    Lcb,
}

/// Policy selector used by the harness and the CLI.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyKind {
    Ucb,
    Lcb,
    Oto {
        variant: BudgetVariant,
        alpha: f64,
        /// `Some(T)` runs with a known horizon; `None` uses the doubling
        /// proxy horizon.
        horizon: Option<u64>,
    },
}

impl PolicyKind {
    pub fn oto(variant: BudgetVariant, alpha: f64, horizon: Option<u64>) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be a finite non-negative real, got {alpha}"
            )));
        }
        if horizon == Some(0) {
            return Err(Error::InvalidParameter(
                "known horizon must be at least 1".into(),
            ));
        }
        Ok(Self::Oto {
            variant,
            alpha,
            horizon,
        })
    }
}

/// How the exploration budget is accounted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BudgetVariant {
    /// Asymmetric update: exploratory rounds accumulate reward terms,
    /// pessimistic rounds accumulate slack.
    #[default]
    Main,
    /// Unified update over all pulls, benchmark frozen at round zero.
    PartialUpdate,
    /// Unified update with the benchmark re-evaluated every round.
    FullUpdate,
}

/// Smallest index attaining the maximal upper confidence bound.
/// Unsampled arms have an infinite bound and therefore win.
pub fn select_ucb(state: &ConfidenceState) -> usize {
    argmax((0..state.arm_count()).map(|i| state.upper_bound(i)))
}

/// Smallest index attaining the maximal running-max lower confidence bound.
pub fn select_lcb(state: &ConfidenceState) -> usize {
    argmax(state.lower_bounds().iter().copied())
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0;
    for (i, v) in values.enumerate() {
        if v > best {
            best = v;
            best_idx = i;
        }
    }
    best_idx
}

/// Offline-data uncertainty scale `(sum_i sqrt(m_i) / m) * sqrt(2 * log_term)`.
///
/// In unknown-horizon mode the caller passes the round-one log term once and
/// never re-evaluates; the scale reflects uncertainty about the logged data,
/// which does not change as play proceeds.
pub fn compute_beta(offline: &OfflineDataset, log_term: f64) -> Result<f64> {
    if !log_term.is_finite() || log_term <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "log term must be positive and finite, got {log_term}"
        )));
    }
    let total = offline.total_count();
    if total == 0 {
        return Err(Error::DegenerateOffline(
            "beta is undefined without offline samples".into(),
        ));
    }
    let root_sum: f64 = offline.counts().iter().map(|&m| (m as f64).sqrt()).sum();
    Ok(root_sum / total as f64 * (2.0 * log_term).sqrt())
}

/// Budget bookkeeping for the OtO policy. Single-writer, one per run.
#[derive(Debug, Clone, PartialEq)]
pub struct OtoState {
    variant: BudgetVariant,
    alpha: f64,
    beta: f64,
    gamma: f64,
    /// Arm with the best lower bound before any online pull; anchors the
    /// re-evaluated benchmark of `FullUpdate`.
    initial_lcb_arm: Option<usize>,
    /// Set when there is no offline data: the budget is conceptually
    /// unbounded and every round plays the UCB arm.
    always_ucb: bool,
    horizon_known: bool,
    proxy_horizon: u64,
    ucb_counts: Vec<u64>,
    lcb_counts: Vec<u64>,
    lcb_total: u64,
    step: u64,
}

impl OtoState {
    /// Initialise at round zero from the offline data and the matching
    /// confidence state. `beta` and `gamma` are fixed here and, for the
    /// `Main` and `PartialUpdate` variants, never change afterwards.
    pub fn new(
        offline: &OfflineDataset,
        state: &ConfidenceState,
        variant: BudgetVariant,
        alpha: f64,
        horizon: Option<u64>,
    ) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be a finite non-negative real, got {alpha}"
            )));
        }
        if offline.arm_count() != state.arm_count() {
            return Err(Error::Config(format!(
                "offline data has {} arms but the confidence state has {}",
                offline.arm_count(),
                state.arm_count()
            )));
        }
        let (horizon_known, proxy_horizon) = match horizon {
            Some(0) => {
                return Err(Error::InvalidParameter(
                    "known horizon must be at least 1".into(),
                ))
            }
            Some(t) => (true, t),
            None => (false, 2),
        };
        let k = offline.arm_count();
        if offline.total_count() == 0 {
            return Ok(Self {
                variant,
                alpha,
                beta: 0.0,
                gamma: f64::NEG_INFINITY,
                initial_lcb_arm: None,
                always_ucb: true,
                horizon_known,
                proxy_horizon,
                ucb_counts: vec![0; k],
                lcb_counts: vec![0; k],
                lcb_total: 0,
                step: 0,
            });
        }
        let beta = compute_beta(offline, state.log_term())?;
        let initial_lcb_arm = select_lcb(state);
        let gamma = state.lower_bound(initial_lcb_arm) - alpha * beta;
        Ok(Self {
            variant,
            alpha,
            beta,
            gamma,
            initial_lcb_arm: Some(initial_lcb_arm),
            always_ucb: false,
            horizon_known,
            proxy_horizon,
            ucb_counts: vec![0; k],
            lcb_counts: vec![0; k],
            lcb_total: 0,
            step: 0,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn always_ucb(&self) -> bool {
        self.always_ucb
    }

    pub fn proxy_horizon(&self) -> u64 {
        self.proxy_horizon
    }

    /// Pulls of each arm made on the exploratory branch.
    pub fn ucb_counts(&self) -> &[u64] {
        &self.ucb_counts
    }

    /// Pulls of each arm made on the pessimistic branch.
    pub fn lcb_counts(&self) -> &[u64] {
        &self.lcb_counts
    }

    /// Total pessimistic pulls so far.
    pub fn lcb_total(&self) -> u64 {
        self.lcb_total
    }

    /// In unknown-horizon mode, double the proxy horizon while the round
    /// index exceeds it. With rounds advancing one at a time a single
    /// doubling always suffices, which is asserted. Known horizon: no-op.
    pub fn update_proxy_horizon(&mut self, t: u64) {
        if self.horizon_known {
            return;
        }
        let mut doublings = 0u32;
        while t > self.proxy_horizon {
            self.proxy_horizon *= 2;
            doublings += 1;
        }
        assert!(
            doublings <= 1,
            "proxy horizon doubled {doublings} times in one round (t = {t})"
        );
    }

    /// Benchmark in force at the current round: frozen for `Main` and
    /// `PartialUpdate`, re-evaluated from the anchored arm for `FullUpdate`.
    fn effective_gamma(&self, state: &ConfidenceState) -> f64 {
        match (self.variant, self.initial_lcb_arm) {
            (BudgetVariant::FullUpdate, Some(arm)) => {
                state.lower_bound(arm) - self.alpha * self.beta
            }
            _ => self.gamma,
        }
    }

    /// Exploration budget at round `t`, evaluated before the pull: `state`
    /// and the branch counts reflect decisions through round `t - 1`, and
    /// the proxy horizon has already been updated for `t`.
    ///
    /// Products `0 * (-inf)` count as zero; if the proposed arm's lower
    /// bound is `-inf` the whole budget is `-inf`. Returns `+inf` in the
    /// degenerate always-UCB mode.
    pub fn budget(&self, state: &ConfidenceState, ucb_arm: usize, t: u64) -> f64 {
        if self.always_ucb {
            return f64::INFINITY;
        }
        let gamma = self.effective_gamma(state);
        let slack = self.alpha * self.beta;
        let mut total = state.lower_bound(ucb_arm) - gamma;
        match self.variant {
            BudgetVariant::Main => {
                for (i, &pulls) in self.ucb_counts.iter().enumerate() {
                    total += weighted(pulls, state.lower_bound(i) - gamma);
                }
                total += (self.lcb_total + (self.proxy_horizon - t)) as f64 * slack;
            }
            BudgetVariant::PartialUpdate | BudgetVariant::FullUpdate => {
                for i in 0..state.arm_count() {
                    total += weighted(state.online_count(i), state.lower_bound(i) - gamma);
                }
                total += (self.proxy_horizon - t) as f64 * slack;
            }
        }
        total
    }

    /// One round: update the proxy horizon, propose the UCB arm, play it if
    /// the budget is strictly positive, otherwise play the LCB arm. Branch
    /// counts are updated for the returned decision.
    pub fn step(&mut self, state: &ConfidenceState, t: u64) -> (usize, Branch) {
        self.update_proxy_horizon(t);
        let ucb_arm = select_ucb(state);
        let decision = if self.always_ucb || self.budget(state, ucb_arm, t) > 0.0 {
            self.ucb_counts[ucb_arm] += 1;
            (ucb_arm, Branch::Ucb)
        } else {
            let lcb_arm = select_lcb(state);
            self.lcb_counts[lcb_arm] += 1;
            self.lcb_total += 1;
            (lcb_arm, Branch::Lcb)
        };
        self.step = t;
        decision
    }

    /// Realized-budget bookkeeping, evaluated after the pull at round `t`
    /// (counts and bounds reflect the round's decision). Uses the frozen
    /// benchmark; for the `Main` variant this quantity stays non-negative on
    /// every trajectory. `+inf` in always-UCB mode.
    pub fn pseudo_budget(&self, state: &ConfidenceState, t: u64) -> f64 {
        if self.always_ucb {
            return f64::INFINITY;
        }
        let mut total = 0.0;
        for (i, &pulls) in self.ucb_counts.iter().enumerate() {
            total += weighted(pulls, state.lower_bound(i) - self.gamma);
        }
        total += (self.lcb_total + (self.proxy_horizon - t)) as f64 * (self.alpha * self.beta);
        total
    }
}

/// `count * value` with the convention that zero pulls contribute zero even
/// when `value` is infinite.
#[inline]
fn weighted(count: u64, value: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * value
    }
}
