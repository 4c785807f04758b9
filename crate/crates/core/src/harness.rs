//! Episode execution, dual regret accounting and multi-replication
//! aggregation.
//!
//! Regret is measured against true means (pseudo-regret), both relative to
//! the best arm and relative to the logging policy's value. Because the
//! environment is known to the harness, every run also tracks whether any
//! true mean ever escaped its confidence interval.
//!
//! Replications share nothing mutable: replication `r` runs with seed
//! `base_seed + r`, offline sampling and online rewards draw from disjoint
//! RNG streams, and results are joined by replication index. Output is
//! therefore independent of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::confidence::{ConfidenceState, DeltaSchedule};
use crate::error::{Error, Result};
use crate::instance::BanditInstance;
use crate::offline::{sample_offline, OfflineDataset};
use crate::policies::{select_lcb, select_ucb, Branch, OtoState, PolicyKind};
use crate::replay::{ReplayEnvironment, RewardTable};

/// RNG stream reserved for reward draws during the online phase; offline
/// sampling uses streams `0..K`.
pub(crate) const ONLINE_STREAM: u64 = u64::MAX;

/// A source of rewards with known true means.
pub trait Environment {
    fn arm_count(&self) -> usize;
    fn true_mean(&self, arm: usize) -> f64;
    fn pull(&mut self, arm: usize) -> f64;
}

/// Samples rewards from a known bandit instance.
pub struct SimEnvironment<'a> {
    instance: &'a BanditInstance,
    rng: ChaCha8Rng,
}

impl<'a> SimEnvironment<'a> {
    pub fn new(instance: &'a BanditInstance, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(ONLINE_STREAM);
        Self { instance, rng }
    }
}

impl Environment for SimEnvironment<'_> {
    fn arm_count(&self) -> usize {
        self.instance.arm_count()
    }

    fn true_mean(&self, arm: usize) -> f64 {
        self.instance.arm(arm).mean()
    }

    fn pull(&mut self, arm: usize) -> f64 {
        self.instance.arm(arm).sample(&mut self.rng)
    }
}

/// Per-round trace kept only for OtO runs.
#[derive(Debug, Clone, PartialEq)]
pub struct OtoTrace {
    pub branches: Vec<Branch>,
    /// Realized-budget value after each round's pull.
    pub pseudo_budget: Vec<f64>,
    /// Proxy horizon in force at each round.
    pub proxy_horizon: Vec<u64>,
}

/// Everything recorded about one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub actions: Vec<usize>,
    /// `t * best_mean - sum of played means`, per round.
    pub pseudo_regret: Vec<f64>,
    /// `t * logging_mean - sum of played means`, per round; `NaN` throughout
    /// when there is no offline data to define the logging policy.
    pub log_regret: Vec<f64>,
    /// Running sum of realized rewards.
    pub cumulative_reward: Vec<f64>,
    /// Some true mean exceeded its upper confidence bound at some round.
    pub upper_violated: bool,
    /// Some true mean fell below its running-max lower bound at some round.
    pub lower_violated: bool,
    pub oto: Option<OtoTrace>,
}

impl RunRecord {
    pub fn horizon(&self) -> usize {
        self.actions.len()
    }

    pub fn confidence_violated(&self) -> bool {
        self.upper_violated || self.lower_violated
    }
}

enum PolicyRuntime {
    Ucb,
    Lcb,
    Oto(OtoState),
}

/// Run one episode against an arbitrary environment. `seed` is recorded in
/// the output; reward randomness belongs to the environment itself.
pub fn run_episode_env<E: Environment>(
    env: &mut E,
    offline: &OfflineDataset,
    policy: &PolicyKind,
    horizon: u64,
    schedule: DeltaSchedule,
    seed: u64,
) -> Result<RunRecord> {
    let k = env.arm_count();
    if offline.arm_count() != k {
        return Err(Error::Config(format!(
            "offline data has {} arms but the environment has {k}",
            offline.arm_count()
        )));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    let true_means: Vec<f64> = (0..k).map(|i| env.true_mean(i)).collect();
    let best_mean = true_means.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let logging_mean = {
        let total = offline.total_count();
        if total == 0 {
            None
        } else {
            let sum: f64 = offline
                .counts()
                .iter()
                .zip(&true_means)
                .map(|(&c, &mu)| c as f64 * mu)
                .sum();
            Some(sum / total as f64)
        }
    };

    let mut state = ConfidenceState::new(offline, schedule.log_term(k, 1))?;
    let mut runtime = match policy {
        PolicyKind::Ucb => PolicyRuntime::Ucb,
        PolicyKind::Lcb => PolicyRuntime::Lcb,
        PolicyKind::Oto {
            variant,
            alpha,
            horizon: policy_horizon,
        } => PolicyRuntime::Oto(OtoState::new(
            offline,
            &state,
            *variant,
            *alpha,
            *policy_horizon,
        )?),
    };

    let mut upper_violated = false;
    let mut lower_violated = false;
    let check_violations = |state: &ConfidenceState, up: &mut bool, low: &mut bool| {
        for (arm, &mu) in true_means.iter().enumerate() {
            if state.upper_bound(arm) < mu {
                *up = true;
            }
            if state.lower_bound(arm) > mu {
                *low = true;
            }
        }
    };
    check_violations(&state, &mut upper_violated, &mut lower_violated);

    let mut actions = Vec::with_capacity(horizon as usize);
    let mut pseudo_regret = Vec::with_capacity(horizon as usize);
    let mut log_regret = Vec::with_capacity(horizon as usize);
    let mut cumulative_reward = Vec::with_capacity(horizon as usize);
    let mut trace = match runtime {
        PolicyRuntime::Oto(_) => Some(OtoTrace {
            branches: Vec::with_capacity(horizon as usize),
            pseudo_budget: Vec::with_capacity(horizon as usize),
            proxy_horizon: Vec::with_capacity(horizon as usize),
        }),
        _ => None,
    };

    let mut mean_sum = 0.0;
    let mut reward_sum = 0.0;
    for t in 1..=horizon {
        if matches!(schedule, DeltaSchedule::TimeVarying { .. }) {
            state.set_log_term(schedule.log_term(k, t))?;
        }
        let (arm, branch) = match &mut runtime {
            PolicyRuntime::Ucb => (select_ucb(&state), None),
            PolicyRuntime::Lcb => (select_lcb(&state), None),
            PolicyRuntime::Oto(oto) => {
                let (arm, branch) = oto.step(&state, t);
                (arm, Some(branch))
            }
        };
        let reward = env.pull(arm);
        state.update_after_pull(arm, reward)?;
        check_violations(&state, &mut upper_violated, &mut lower_violated);

        mean_sum += true_means[arm];
        reward_sum += reward;
        actions.push(arm);
        pseudo_regret.push(t as f64 * best_mean - mean_sum);
        log_regret.push(match logging_mean {
            Some(mu0) => t as f64 * mu0 - mean_sum,
            None => f64::NAN,
        });
        cumulative_reward.push(reward_sum);
        if let (Some(trace), PolicyRuntime::Oto(oto), Some(branch)) =
            (trace.as_mut(), &runtime, branch)
        {
            trace.branches.push(branch);
            trace.pseudo_budget.push(oto.pseudo_budget(&state, t));
            trace.proxy_horizon.push(oto.proxy_horizon());
        }
    }

    Ok(RunRecord {
        seed,
        actions,
        pseudo_regret,
        log_regret,
        cumulative_reward,
        upper_violated,
        lower_violated,
        oto: trace,
    })
}

/// Run one episode on a known instance: rewards are drawn from the
/// instance's distributions on a stream derived from `seed`.
pub fn run_episode(
    instance: &BanditInstance,
    offline: &OfflineDataset,
    policy: &PolicyKind,
    horizon: u64,
    schedule: DeltaSchedule,
    seed: u64,
) -> Result<RunRecord> {
    let mut env = SimEnvironment::new(instance, seed);
    run_episode_env(&mut env, offline, policy, horizon, schedule, seed)
}

/// Per-step sample statistics over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub replications: usize,
    pub horizon: usize,
    pub mean_regret: Vec<f64>,
    pub std_regret: Vec<f64>,
    pub mean_log_regret: Vec<f64>,
    pub std_log_regret: Vec<f64>,
    pub mean_cumulative_reward: Vec<f64>,
}

/// Per-step mean and sample standard deviation (divisor `n - 1`; zero for a
/// single record) of both regrets, plus the mean cumulative reward.
/// Records are summed in seed order, so the result does not depend on the
/// order of the input list.
pub fn aggregate(records: &[RunRecord]) -> Result<AggregateResult> {
    if records.is_empty() {
        return Err(Error::EmptyAggregate);
    }
    let horizon = records[0].horizon();
    if records.iter().any(|r| r.horizon() != horizon) {
        return Err(Error::Config(
            "run records have differing horizons".into(),
        ));
    }
    let mut ordered: Vec<&RunRecord> = records.iter().collect();
    ordered.sort_by_key(|r| r.seed);
    let n = ordered.len() as f64;

    let column_stats = |select: &dyn Fn(&RunRecord) -> &[f64]| {
        let mut means = vec![0.0; horizon];
        let mut stds = vec![0.0; horizon];
        for t in 0..horizon {
            let sum: f64 = ordered.iter().map(|r| select(r)[t]).sum();
            let mean = sum / n;
            means[t] = mean;
            if ordered.len() > 1 {
                let ss: f64 = ordered
                    .iter()
                    .map(|r| {
                        let d = select(r)[t] - mean;
                        d * d
                    })
                    .sum();
                stds[t] = (ss / (n - 1.0)).sqrt();
            }
        }
        (means, stds)
    };

    let (mean_regret, std_regret) = column_stats(&|r| &r.pseudo_regret);
    let (mean_log_regret, std_log_regret) = column_stats(&|r| &r.log_regret);
    let (mean_cumulative_reward, _) = column_stats(&|r| &r.cumulative_reward);

    Ok(AggregateResult {
        replications: records.len(),
        horizon,
        mean_regret,
        std_regret,
        mean_log_regret,
        std_log_regret,
        mean_cumulative_reward,
    })
}

/// Run `replications` independent episodes on a known instance, resampling
/// the offline data each time. Replication `r` uses seed `base_seed + r`.
pub fn run_many(
    instance: &BanditInstance,
    offline_counts: &[u64],
    policy: &PolicyKind,
    horizon: u64,
    schedule: DeltaSchedule,
    base_seed: u64,
    replications: u64,
) -> Result<Vec<RunRecord>> {
    (0..replications)
        .into_par_iter()
        .map(|r| {
            let seed = base_seed.wrapping_add(r);
            let offline = sample_offline(instance, offline_counts, seed)?;
            run_episode(instance, &offline, policy, horizon, schedule, seed)
        })
        .collect()
}

/// Replay analogue of [`run_many`]: offline data and online rewards both
/// come from the reward table, with column means as ground truth.
pub fn run_many_replay(
    table: &RewardTable,
    offline_counts: &[u64],
    policy: &PolicyKind,
    horizon: u64,
    schedule: DeltaSchedule,
    base_seed: u64,
    replications: u64,
) -> Result<Vec<RunRecord>> {
    (0..replications)
        .into_par_iter()
        .map(|r| {
            let seed = base_seed.wrapping_add(r);
            let mut env = ReplayEnvironment::new(table, seed);
            let offline = env.build_offline(offline_counts, seed)?;
            run_episode_env(&mut env, &offline, policy, horizon, schedule, seed)
        })
        .collect()
}
