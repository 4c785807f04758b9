//! The three subcommands: `run` (synthetic experiments), `bounds` (bound
//! curves) and `replay` (reward-table experiments).
//!
//! Each experiment writes one CSV per policy with the fixed column order
//! `t, mean_regret, std_regret, mean_log_regret, std_log_regret,
//! mean_cumulative_reward`, one row per round, plus `manifest.toml` echoing
//! the fully resolved config and the per-replication seeds. Floats use
//! Rust's shortest round-trip formatting; infinities render as `inf`.
//!
//! Replications for different policies reuse the same seeds in `run`. In
//! `replay` each policy gets its own seed stream unless
//! `run.common_random_numbers = true`.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use otob_core::{
    aggregate, bounds, compute_beta, run_many, run_many_replay, AggregateResult, OfflineDataset,
    PolicyKind,
};

use crate::config::{InstanceSpec, ResolvedConfig};
use crate::CliError;

/// Seed offset between policies when streams are independent.
const POLICY_SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

pub struct CommandOutput {
    pub files: Vec<PathBuf>,
}

fn runtime(msg: impl std::fmt::Display) -> CliError {
    CliError::Runtime(msg.to_string())
}

/// Run every configured policy on a synthetic instance and write the CSVs.
pub fn execute_run(cfg: &ResolvedConfig) -> Result<CommandOutput, CliError> {
    let instance = match &cfg.instance {
        InstanceSpec::Synthetic(instance) => instance,
        InstanceSpec::Replay { .. } => {
            return Err(CliError::Validation(
                "instance.kind: run expects a synthetic instance; use the replay subcommand"
                    .into(),
            ))
        }
    };
    let mut files = Vec::new();
    for policy in &cfg.policies {
        let records = run_many(
            instance,
            &cfg.counts,
            &policy.kind,
            cfg.horizon,
            cfg.schedule,
            cfg.seed,
            cfg.replications,
        )
        .map_err(runtime)?;
        let agg = aggregate(&records).map_err(runtime)?;
        files.push(write_policy_csv(cfg, &policy.label, &agg)?);
    }
    files.push(write_manifest(cfg, "run", &files)?);
    Ok(CommandOutput { files })
}

/// Run every configured policy against the reward table and write the CSVs.
pub fn execute_replay(cfg: &ResolvedConfig) -> Result<CommandOutput, CliError> {
    let table = match &cfg.instance {
        InstanceSpec::Replay { table, .. } => table,
        InstanceSpec::Synthetic(_) => {
            return Err(CliError::Validation(
                "instance.kind: replay expects kind = \"replay\" with a table path".into(),
            ))
        }
    };
    let mut files = Vec::new();
    for (index, policy) in cfg.policies.iter().enumerate() {
        let records = run_many_replay(
            table,
            &cfg.counts,
            &policy.kind,
            cfg.horizon,
            cfg.schedule,
            replay_policy_seed(cfg, index),
            cfg.replications,
        )
        .map_err(runtime)?;
        let agg = aggregate(&records).map_err(runtime)?;
        files.push(write_policy_csv(cfg, &policy.label, &agg)?);
    }
    files.push(write_manifest(cfg, "replay", &files)?);
    Ok(CommandOutput { files })
}

/// Base seed for policy `index` in a replay experiment.
pub fn replay_policy_seed(cfg: &ResolvedConfig, index: usize) -> u64 {
    if cfg.common_random_numbers {
        cfg.seed
    } else {
        cfg.seed
            .wrapping_add((index as u64).wrapping_mul(POLICY_SEED_STRIDE))
    }
}

/// Tabulate every applicable bound evaluator, one row per round.
pub fn execute_bounds(cfg: &ResolvedConfig) -> Result<CommandOutput, CliError> {
    let means = cfg.instance.true_means();
    let best = means.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let gaps: Vec<f64> = means.iter().map(|&m| best - m).collect();
    let arms = cfg.counts.len();

    // The budget-gated bounds use the first oto policy's parameters; without
    // one, alpha = 0 (its bound columns degenerate to +inf) and a known
    // horizon.
    let (alpha, horizon_known) = cfg
        .policies
        .iter()
        .find_map(|p| match p.kind {
            PolicyKind::Oto { alpha, horizon, .. } => Some((alpha, horizon.is_some())),
            _ => None,
        })
        .unwrap_or((0.0, true));
    // Offline-uncertainty scale from the round-one log term; zero without
    // offline samples (the affected columns then report inf).
    let offline = offline_for_beta(&cfg.counts);
    let beta = match &offline {
        Some(data) => compute_beta(data, cfg.schedule.log_term(arms, 1)).map_err(runtime)?,
        None => 0.0,
    };

    let mut out = String::new();
    out.push_str(
        "t,oto_log_regret_bound,oto_regret_bound,subset_max,minimax_lower_bound,\
         ucb_instance_bound,ucb_minimax_bound,lcb_upper_bound,lcb_lower_bound,\
         ucb_log_lower_bound,ucb_log_lower_effective_t,lcb_log_upper_bound,\
         lcb_log_lower_bound,ucb_log_t1_upper_bound,ucb_log_t1_lower_bound\n",
    );
    for t in 1..=cfg.horizon {
        let delta = cfg.schedule.delta_at(t);
        let log_term = cfg.schedule.log_term(arms, t);
        let subset = bounds::maximize_over_subsets(&cfg.counts, t, log_term);
        let minimax_lower = bounds::minimax_lower_bound(&cfg.counts, t);
        let ucb = bounds::ucb_regret_bounds(&gaps, &cfg.counts, delta, t);
        let lcb = bounds::lcb_bounds(&cfg.counts, delta, t);
        let ucb_log = bounds::ucb_log_regret_lower_bound(&cfg.counts, t);
        let lcb_log = bounds::lcb_log_regret_bounds(&cfg.counts, delta, t);
        let t1 = bounds::ucb_log_regret_t1_bounds(&cfg.counts, delta);
        writeln!(
            out,
            "{t},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            bounds::oto_log_regret_bound(t, alpha, beta, horizon_known),
            bounds::oto_regret_bound(&gaps, &cfg.counts, delta, alpha, beta),
            subset.value,
            minimax_lower,
            ucb.instance,
            ucb.minimax,
            lcb.upper,
            lcb.lower,
            ucb_log.value,
            ucb_log.effective_t,
            lcb_log.upper,
            lcb_log.lower,
            t1.upper,
            t1.lower,
        )
        .expect("write to string");
    }

    fs::create_dir_all(&cfg.out_dir).map_err(runtime)?;
    let path = cfg.out_dir.join("bounds.csv");
    fs::write(&path, out).map_err(runtime)?;
    Ok(CommandOutput { files: vec![path] })
}

/// Offline dataset carrying only counts, for evaluating the uncertainty
/// scale; means are irrelevant there. `None` when all counts are zero.
fn offline_for_beta(counts: &[u64]) -> Option<OfflineDataset> {
    if counts.iter().all(|&c| c == 0) {
        return None;
    }
    let means = counts
        .iter()
        .map(|&c| if c > 0 { Some(0.0) } else { None })
        .collect();
    Some(OfflineDataset::from_parts(counts.to_vec(), means).expect("consistent by construction"))
}

fn write_policy_csv(
    cfg: &ResolvedConfig,
    label: &str,
    agg: &AggregateResult,
) -> Result<PathBuf, CliError> {
    let mut out = String::new();
    out.push_str("t,mean_regret,std_regret,mean_log_regret,std_log_regret,mean_cumulative_reward\n");
    for t in 0..agg.horizon {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            t + 1,
            agg.mean_regret[t],
            agg.std_regret[t],
            agg.mean_log_regret[t],
            agg.std_log_regret[t],
            agg.mean_cumulative_reward[t],
        )
        .expect("write to string");
    }
    fs::create_dir_all(&cfg.out_dir).map_err(runtime)?;
    let path = cfg.out_dir.join(format!("{label}.csv"));
    fs::write(&path, out).map_err(runtime)?;
    Ok(path)
}

fn write_manifest(
    cfg: &ResolvedConfig,
    command: &str,
    files: &[PathBuf],
) -> Result<PathBuf, CliError> {
    let mut out = toml::to_string(&cfg.echo)
        .map_err(|e| runtime(format!("cannot serialize manifest: {e}")))?;
    out.push_str("\n[meta]\n");
    let _ = writeln!(out, "command = {command:?}");
    let bases: Vec<u64> = if command == "replay" {
        (0..cfg.policies.len())
            .map(|i| replay_policy_seed(cfg, i))
            .collect()
    } else {
        vec![cfg.seed; cfg.policies.len()]
    };
    let bases: Vec<String> = bases.iter().map(u64::to_string).collect();
    let _ = writeln!(out, "policy_seed_bases = [{}]", bases.join(", "));
    let seeds: Vec<String> = (0..cfg.replications)
        .map(|r| cfg.seed.wrapping_add(r).to_string())
        .collect();
    let _ = writeln!(out, "seeds = [{}]", seeds.join(", "));
    let names: Vec<String> = files
        .iter()
        .filter_map(|p| p.file_name())
        .map(|n| format!("{:?}", n.to_string_lossy()))
        .collect();
    let _ = writeln!(out, "files = [{}]", names.join(", "));

    fs::create_dir_all(&cfg.out_dir).map_err(runtime)?;
    let path = cfg.out_dir.join("manifest.toml");
    fs::write(&path, out).map_err(runtime)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{load_config, resolve};
    use std::path::Path;

    fn write_config(dir: &Path, body: &str) -> PathBuf {
        let path = dir.join("config.toml");
        fs::write(&path, body).unwrap();
        path
    }

    fn small_run_config(out: &str) -> String {
        format!(
            r#"
[instance]
kind = "bernoulli"
means = [0.9, 0.1]

[offline]
counts = [3, 3]

[[policy]]
name = "ucb"

[[policy]]
name = "lcb"

[run]
T = 15
delta = 0.01
replications = 4
seed = 11

[output]
dir = "{out}"
"#
        )
    }

    #[test]
    fn run_writes_expected_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = write_config(dir.path(), &small_run_config("out"));
        let cfg = resolve(load_config(&cfg_path).unwrap(), dir.path(), None).unwrap();
        let output = execute_run(&cfg).unwrap();
        let names: Vec<String> = output
            .files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, vec!["ucb.csv", "lcb.csv", "manifest.toml"]);

        let csv = fs::read_to_string(&output.files[0]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,mean_regret,std_regret,mean_log_regret,std_log_regret,mean_cumulative_reward"
        );
        assert_eq!(lines.count(), 15);
    }

    #[test]
    fn run_is_deterministic_across_invocations() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = write_config(dir.path(), &small_run_config("a"));
        let cfg = resolve(load_config(&cfg_path).unwrap(), dir.path(), None).unwrap();
        execute_run(&cfg).unwrap();

        let cfg_path2 = write_config(dir.path(), &small_run_config("b"));
        let cfg2 = resolve(load_config(&cfg_path2).unwrap(), dir.path(), None).unwrap();
        execute_run(&cfg2).unwrap();

        for name in ["ucb.csv", "lcb.csv"] {
            let a = fs::read(dir.path().join("a").join(name)).unwrap();
            let b = fs::read(dir.path().join("b").join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between invocations");
        }
    }

    #[test]
    fn manifest_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = write_config(dir.path(), &small_run_config("first"));
        let cfg = resolve(load_config(&cfg_path).unwrap(), dir.path(), None).unwrap();
        execute_run(&cfg).unwrap();

        // Re-parse the manifest as a config, redirect output, re-run.
        let manifest = dir.path().join("first/manifest.toml");
        let mut file = load_config(&manifest).unwrap();
        file.output.dir = dir.path().join("second");
        let cfg2 = resolve(file, dir.path(), None).unwrap();
        execute_run(&cfg2).unwrap();

        for name in ["ucb.csv", "lcb.csv"] {
            let a = fs::read(dir.path().join("first").join(name)).unwrap();
            let b = fs::read(dir.path().join("second").join(name)).unwrap();
            assert_eq!(a, b, "{name} differs after manifest round-trip");
        }
    }

    #[test]
    fn single_arm_regret_is_zero() {
        let dir = tempfile::tempdir().unwrap();
        let body = r#"
[instance]
kind = "bernoulli"
means = [0.5]

[offline]
counts = [2]

[[policy]]
name = "lcb"

[run]
T = 8
delta = 0.01
replications = 3
seed = 0

[output]
dir = "out"
"#;
        let cfg_path = write_config(dir.path(), body);
        let cfg = resolve(load_config(&cfg_path).unwrap(), dir.path(), None).unwrap();
        let output = execute_run(&cfg).unwrap();
        let csv = fs::read_to_string(&output.files[0]).unwrap();
        for line in csv.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols[1], "0");
            assert_eq!(cols[3], "0");
        }
    }

    #[test]
    fn run_rejects_replay_instance() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("table.csv"), "1,0\n0,1\n").unwrap();
        let body = r#"
[instance]
kind = "replay"
table = "table.csv"

[offline]
counts = [1, 1]

[[policy]]
name = "ucb"

[run]
T = 5
delta = 0.01
replications = 1
seed = 0

[output]
dir = "out"
"#;
        let cfg_path = write_config(dir.path(), body);
        let cfg = resolve(load_config(&cfg_path).unwrap(), dir.path(), None).unwrap();
        assert!(matches!(execute_run(&cfg), Err(CliError::Validation(_))));
        // But replay accepts it.
        execute_replay(&cfg).unwrap();
    }

    #[test]
    fn bounds_columns_behave() {
        let dir = tempfile::tempdir().unwrap();
        // Uniform counts with an oto policy at alpha = 0: the ucb log lower
        // bound column is all zeros and the oto regret bound is inf.
        let body = r#"
[instance]
kind = "bernoulli"
means = [0.5, 0.5, 0.5]

[offline]
counts = [4, 4, 4]

[[policy]]
name = "oto"
alpha = 0.0

[run]
T = 6
delta = 0.05
replications = 1
seed = 0

[output]
dir = "out"
"#;
        let cfg_path = write_config(dir.path(), body);
        let cfg = resolve(load_config(&cfg_path).unwrap(), dir.path(), None).unwrap();
        let output = execute_bounds(&cfg).unwrap();
        let csv = fs::read_to_string(&output.files[0]).unwrap();
        let header = csv.lines().next().unwrap();
        let col = |name: &str| {
            header
                .split(',')
                .position(|c| c == name)
                .unwrap_or_else(|| panic!("missing column {name}"))
        };
        for line in csv.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols[col("ucb_log_lower_bound")], "0");
            assert_eq!(cols[col("oto_regret_bound")], "inf");
        }
        assert_eq!(csv.lines().count(), 7);
    }
}
