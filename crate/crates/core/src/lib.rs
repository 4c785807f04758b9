//! Offline-to-online multi-armed bandits.
//!
//! A learner starts from logged per-arm data (counts and empirical means)
//! and then interacts online. This crate provides:
//!
//! - domain types for instances, offline datasets and pooled confidence
//!   bounds ([`instance`], [`offline`], [`confidence`]);
//! - the UCB and LCB baselines plus the budget-gated OtO policy that
//!   interpolates between them ([`policies`]);
//! - closed-form regret bound evaluators usable as numeric oracles
//!   ([`bounds`]);
//! - a deterministic, embarrassingly parallel experiment harness with dual
//!   regret accounting ([`harness`]);
//! - a reward-table replay environment for logged binary feedback
//!   ([`replay`]).

pub mod bounds;
pub mod confidence;
pub mod error;
pub mod harness;
pub mod instance;
pub mod offline;
pub mod policies;
pub mod replay;

pub use confidence::{confidence_radius, ConfidenceState, DeltaSchedule};
pub use error::{Error, Result};
pub use harness::{
    aggregate, run_episode, run_episode_env, run_many, run_many_replay, AggregateResult,
    Environment, OtoTrace, RunRecord, SimEnvironment,
};
pub use instance::{ArmDistribution, BanditInstance};
pub use offline::{sample_offline, OfflineDataset};
pub use policies::{compute_beta, select_lcb, select_ucb, Branch, BudgetVariant, OtoState, PolicyKind};
pub use replay::{load_reward_table, ReplayEnvironment, RewardTable};
