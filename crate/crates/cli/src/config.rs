//! Experiment configuration: a flat TOML file with the sections
//! `[instance]`, `[offline]`, `[[policy]]`, `[run]` and `[output]`.
//!
//! Everything is validated up front; validation failures name the offending
//! key and exit with status 2 before any work starts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use otob_core::{
    load_reward_table, ArmDistribution, BanditInstance, BudgetVariant, DeltaSchedule, PolicyKind,
    RewardTable,
};

use crate::CliError;

/// On-disk shape of the config file. Also used verbatim as the config echo
/// inside the run manifest, so it must round-trip through TOML.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigFile {
    pub instance: InstanceSection,
    pub offline: OfflineSection,
    #[serde(default)]
    pub policy: Vec<PolicySection>,
    pub run: RunSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceSection {
    /// One of `bernoulli`, `gaussian`, `deterministic`, `replay`.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub means: Option<Vec<f64>>,
    /// Gaussian only; defaults to 1.0 per arm.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stddevs: Option<Vec<f64>>,
    /// Replay only: path to the reward-table CSV.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OfflineSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<i64>>,
    /// Alternative to `counts`: a file with one integer per line, K lines.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicySection {
    /// One of `ucb`, `lcb`, `oto`.
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// One of `main`, `partial-update`, `full-update`; defaults to `main`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    /// `known` (budget uses `run.T`) or `unknown` (doubling proxy horizon);
    /// defaults to `known`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSection {
    #[serde(rename = "T")]
    pub horizon: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta0: Option<f64>,
    pub replications: u64,
    pub seed: u64,
    /// Replay only: share reward-row draws across policies. Defaults to
    /// false (independent streams per policy).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub common_random_numbers: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputSection {
    pub dir: PathBuf,
}

/// The environment an experiment runs against.
#[derive(Debug)]
pub enum InstanceSpec {
    Synthetic(BanditInstance),
    Replay { table: RewardTable, path: PathBuf },
}

impl InstanceSpec {
    pub fn arm_count(&self) -> usize {
        match self {
            Self::Synthetic(instance) => instance.arm_count(),
            Self::Replay { table, .. } => table.arm_count(),
        }
    }

    /// True means: declared for synthetic instances, column means for replay.
    pub fn true_means(&self) -> Vec<f64> {
        match self {
            Self::Synthetic(instance) => instance.means(),
            Self::Replay { table, .. } => table.column_means(),
        }
    }
}

/// A policy entry with a stable label used for its output file.
#[derive(Debug)]
pub struct ResolvedPolicy {
    pub label: String,
    pub kind: PolicyKind,
}

/// Fully validated configuration, ready to execute.
#[derive(Debug)]
pub struct ResolvedConfig {
    pub instance: InstanceSpec,
    pub counts: Vec<u64>,
    pub policies: Vec<ResolvedPolicy>,
    pub horizon: u64,
    pub schedule: DeltaSchedule,
    pub replications: u64,
    pub seed: u64,
    pub common_random_numbers: bool,
    pub out_dir: PathBuf,
    /// Config echo with the seed override applied, counts inlined and file
    /// paths absolutized; written to the manifest.
    pub echo: ConfigFile,
}

fn invalid(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{key}: {msg}"))
}

pub fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Validation(format!("config parse error: {e}")))
}

/// Validate and resolve a parsed config. Relative input paths are taken
/// relative to `base_dir` (the config file's directory) and absolutized.
pub fn resolve(
    mut file: ConfigFile,
    base_dir: &Path,
    seed_override: Option<u64>,
) -> Result<ResolvedConfig, CliError> {
    if let Some(seed) = seed_override {
        file.run.seed = seed;
    }

    let instance = resolve_instance(&mut file.instance, base_dir)?;
    let arms = instance.arm_count();
    let counts = resolve_counts(&mut file.offline, base_dir, arms)?;

    if file.policy.is_empty() {
        return Err(invalid("policy", "at least one policy entry is required"));
    }
    if file.run.horizon == 0 {
        return Err(invalid("run.T", "must be at least 1"));
    }
    if file.run.replications == 0 {
        return Err(invalid("run.replications", "must be at least 1"));
    }

    let schedule = match (file.run.delta, file.run.delta0) {
        (Some(_), Some(_)) => {
            return Err(invalid(
                "run.delta",
                "run.delta and run.delta0 are mutually exclusive",
            ))
        }
        (None, None) => {
            return Err(invalid(
                "run.delta",
                "exactly one of run.delta or run.delta0 is required",
            ))
        }
        (Some(delta), None) => {
            DeltaSchedule::fixed(delta).map_err(|e| invalid("run.delta", e))?
        }
        (None, Some(delta0)) => {
            DeltaSchedule::time_varying(delta0).map_err(|e| invalid("run.delta0", e))?
        }
    };

    let mut policies = Vec::with_capacity(file.policy.len());
    let mut labels: Vec<String> = Vec::new();
    for (i, entry) in file.policy.iter().enumerate() {
        let resolved = resolve_policy(entry, i, file.run.horizon)?;
        let mut label = resolved.label.clone();
        let mut suffix = 1;
        while labels.contains(&label) {
            suffix += 1;
            label = format!("{}-{suffix}", resolved.label);
        }
        labels.push(label.clone());
        policies.push(ResolvedPolicy {
            label,
            kind: resolved.kind,
        });
    }

    let out_dir = absolutize(base_dir, &file.output.dir);
    file.output.dir = out_dir.clone();

    Ok(ResolvedConfig {
        instance,
        counts,
        policies,
        horizon: file.run.horizon,
        schedule,
        replications: file.run.replications,
        seed: file.run.seed,
        common_random_numbers: file.run.common_random_numbers.unwrap_or(false),
        out_dir,
        echo: file,
    })
}

fn absolutize(base_dir: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base_dir.join(path)
    }
}

fn resolve_instance(
    section: &mut InstanceSection,
    base_dir: &Path,
) -> Result<InstanceSpec, CliError> {
    let check_means = |means: &Option<Vec<f64>>| -> Result<Vec<f64>, CliError> {
        let means = means
            .as_ref()
            .ok_or_else(|| invalid("instance.means", "required for synthetic instances"))?;
        if means.is_empty() {
            return Err(invalid("instance.means", "needs at least one arm"));
        }
        Ok(means.clone())
    };

    match section.kind.as_str() {
        "bernoulli" | "deterministic" => {
            if section.table.is_some() {
                return Err(invalid("instance.table", "only valid for kind = \"replay\""));
            }
            if section.stddevs.is_some() {
                return Err(invalid(
                    "instance.stddevs",
                    "only valid for kind = \"gaussian\"",
                ));
            }
            let means = check_means(&section.means)?;
            let arms: Result<Vec<ArmDistribution>, _> = means
                .iter()
                .map(|&m| {
                    if section.kind == "bernoulli" {
                        ArmDistribution::bernoulli(m)
                    } else {
                        ArmDistribution::deterministic(m)
                    }
                })
                .collect();
            let arms = arms.map_err(|e| invalid("instance.means", e))?;
            Ok(InstanceSpec::Synthetic(
                BanditInstance::new(arms).map_err(|e| invalid("instance.means", e))?,
            ))
        }
        "gaussian" => {
            if section.table.is_some() {
                return Err(invalid("instance.table", "only valid for kind = \"replay\""));
            }
            let means = check_means(&section.means)?;
            let stddevs = match &section.stddevs {
                Some(s) => {
                    if s.len() != means.len() {
                        return Err(invalid(
                            "instance.stddevs",
                            format!("expected {} entries, found {}", means.len(), s.len()),
                        ));
                    }
                    s.clone()
                }
                None => vec![1.0; means.len()],
            };
            let arms: Result<Vec<ArmDistribution>, _> = means
                .iter()
                .zip(&stddevs)
                .map(|(&m, &s)| ArmDistribution::gaussian(m, s))
                .collect();
            let arms = arms.map_err(|e| invalid("instance", e))?;
            Ok(InstanceSpec::Synthetic(
                BanditInstance::new(arms).map_err(|e| invalid("instance.means", e))?,
            ))
        }
        "replay" => {
            if section.means.is_some() || section.stddevs.is_some() {
                return Err(invalid(
                    "instance.means",
                    "not valid for kind = \"replay\"; means come from the table",
                ));
            }
            let rel = section
                .table
                .as_ref()
                .ok_or_else(|| invalid("instance.table", "required for kind = \"replay\""))?;
            let path = absolutize(base_dir, rel);
            let table = load_reward_table(&path)
                .map_err(|e| invalid("instance.table", format!("{}: {e}", path.display())))?;
            section.table = Some(path.clone());
            Ok(InstanceSpec::Replay { table, path })
        }
        other => Err(invalid(
            "instance.kind",
            format!("unknown kind {other:?}; expected bernoulli, gaussian, deterministic or replay"),
        )),
    }
}

fn resolve_counts(
    section: &mut OfflineSection,
    base_dir: &Path,
    arms: usize,
) -> Result<Vec<u64>, CliError> {
    let raw: Vec<i64> = match (&section.counts, &section.counts_file) {
        (Some(_), Some(_)) => {
            return Err(invalid(
                "offline.counts",
                "offline.counts and offline.counts_file are mutually exclusive",
            ))
        }
        (None, None) => {
            return Err(invalid(
                "offline.counts",
                "exactly one of offline.counts or offline.counts_file is required",
            ))
        }
        (Some(counts), None) => counts.clone(),
        (None, Some(rel)) => {
            let path = absolutize(base_dir, rel);
            let text = std::fs::read_to_string(&path).map_err(|e| {
                invalid("offline.counts_file", format!("{}: {e}", path.display()))
            })?;
            let mut counts = Vec::new();
            for (lineno, line) in text.lines().enumerate() {
                let trimmed = line.trim();
                if trimmed.is_empty() {
                    continue;
                }
                let value: i64 = trimmed.parse().map_err(|_| {
                    invalid(
                        "offline.counts_file",
                        format!("line {}: {trimmed:?} is not an integer", lineno + 1),
                    )
                })?;
                counts.push(value);
            }
            section.counts_file = None;
            section.counts = Some(counts.clone());
            counts
        }
    };

    if raw.len() != arms {
        return Err(invalid(
            "offline.counts",
            format!("expected {arms} entries to match the instance, found {}", raw.len()),
        ));
    }
    let mut counts = Vec::with_capacity(raw.len());
    for (i, &c) in raw.iter().enumerate() {
        if c < 0 {
            return Err(invalid(
                &format!("offline.counts[{i}]"),
                "must be non-negative",
            ));
        }
        counts.push(c as u64);
    }
    Ok(counts)
}

fn resolve_policy(
    entry: &PolicySection,
    index: usize,
    horizon: u64,
) -> Result<ResolvedPolicy, CliError> {
    let key = |field: &str| format!("policy[{index}].{field}");
    match entry.name.as_str() {
        "ucb" | "lcb" => {
            if entry.alpha.is_some() || entry.variant.is_some() || entry.horizon.is_some() {
                return Err(invalid(
                    &key("alpha"),
                    "alpha, variant and horizon are only valid for oto",
                ));
            }
            Ok(ResolvedPolicy {
                label: entry.name.clone(),
                kind: if entry.name == "ucb" {
                    PolicyKind::Ucb
                } else {
                    PolicyKind::Lcb
                },
            })
        }
        "oto" => {
            let alpha = entry
                .alpha
                .ok_or_else(|| invalid(&key("alpha"), "required for oto"))?;
            let variant = match entry.variant.as_deref().unwrap_or("main") {
                "main" => BudgetVariant::Main,
                "partial-update" => BudgetVariant::PartialUpdate,
                "full-update" => BudgetVariant::FullUpdate,
                other => {
                    return Err(invalid(
                        &key("variant"),
                        format!(
                            "unknown variant {other:?}; expected main, partial-update or full-update"
                        ),
                    ))
                }
            };
            let known = match entry.horizon.as_deref().unwrap_or("known") {
                "known" => true,
                "unknown" => false,
                other => {
                    return Err(invalid(
                        &key("horizon"),
                        format!("unknown horizon mode {other:?}; expected known or unknown"),
                    ))
                }
            };
            let kind = PolicyKind::oto(variant, alpha, known.then_some(horizon))
                .map_err(|e| invalid(&key("alpha"), e))?;
            let mut label = String::from("oto");
            match variant {
                BudgetVariant::Main => {}
                BudgetVariant::PartialUpdate => label.push_str("-partial"),
                BudgetVariant::FullUpdate => label.push_str("-full"),
            }
            label.push_str(&format!("-a{alpha}"));
            if !known {
                label.push_str("-unk");
            }
            Ok(ResolvedPolicy { label, kind })
        }
        other => Err(invalid(
            &key("name"),
            format!("unknown policy {other:?}; expected ucb, lcb or oto"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_toml() -> String {
        r#"
[instance]
kind = "bernoulli"
means = [0.5, 0.25]

[offline]
counts = [5, 0]

[[policy]]
name = "ucb"

[run]
T = 10
delta = 0.01
replications = 2
seed = 7

[output]
dir = "out"
"#
        .to_string()
    }

    fn resolve_str(text: &str) -> Result<ResolvedConfig, CliError> {
        let file: ConfigFile = toml::from_str(text).unwrap();
        resolve(file, Path::new("/tmp"), None)
    }

    #[test]
    fn minimal_config_resolves() {
        let cfg = resolve_str(&minimal_toml()).unwrap();
        assert_eq!(cfg.counts, vec![5, 0]);
        assert_eq!(cfg.horizon, 10);
        assert_eq!(cfg.policies[0].label, "ucb");
        assert_eq!(cfg.out_dir, PathBuf::from("/tmp/out"));
        assert_eq!(cfg.instance.true_means(), vec![0.5, 0.25]);
    }

    #[test]
    fn seed_override_applies() {
        let file: ConfigFile = toml::from_str(&minimal_toml()).unwrap();
        let cfg = resolve(file, Path::new("/tmp"), Some(99)).unwrap();
        assert_eq!(cfg.seed, 99);
        assert_eq!(cfg.echo.run.seed, 99);
    }

    #[test]
    fn both_deltas_rejected() {
        let text = minimal_toml().replace("delta = 0.01", "delta = 0.01\ndelta0 = 0.5");
        let err = resolve_str(&text).unwrap_err();
        assert!(err.to_string().contains("mutually exclusive"), "{err}");
    }

    #[test]
    fn missing_delta_rejected() {
        let text = minimal_toml().replace("delta = 0.01", "");
        let err = resolve_str(&text).unwrap_err();
        assert!(err.to_string().contains("run.delta"), "{err}");
    }

    #[test]
    fn negative_count_rejected() {
        let text = minimal_toml().replace("counts = [5, 0]", "counts = [5, -1]");
        let err = resolve_str(&text).unwrap_err();
        assert!(err.to_string().contains("offline.counts[1]"), "{err}");
    }

    #[test]
    fn count_length_mismatch_rejected() {
        let text = minimal_toml().replace("counts = [5, 0]", "counts = [5, 0, 1]");
        let err = resolve_str(&text).unwrap_err();
        assert!(err.to_string().contains("expected 2 entries"), "{err}");
    }

    #[test]
    fn oto_requires_alpha() {
        let text = minimal_toml().replace("name = \"ucb\"", "name = \"oto\"");
        let err = resolve_str(&text).unwrap_err();
        assert!(err.to_string().contains("policy[0].alpha"), "{err}");
    }

    #[test]
    fn oto_labels_encode_parameters() {
        let text = minimal_toml().replace(
            "[[policy]]\nname = \"ucb\"",
            "[[policy]]\nname = \"oto\"\nalpha = 0.2\n\n[[policy]]\nname = \"oto\"\nalpha = 0.2\nhorizon = \"unknown\"\n\n[[policy]]\nname = \"oto\"\nalpha = 0.2",
        );
        let cfg = resolve_str(&text).unwrap();
        assert_eq!(cfg.policies[0].label, "oto-a0.2");
        assert_eq!(cfg.policies[1].label, "oto-a0.2-unk");
        // Exact duplicate gets a suffix.
        assert_eq!(cfg.policies[2].label, "oto-a0.2-2");
        assert_eq!(
            cfg.policies[0].kind,
            PolicyKind::oto(BudgetVariant::Main, 0.2, Some(10)).unwrap()
        );
        assert_eq!(
            cfg.policies[1].kind,
            PolicyKind::oto(BudgetVariant::Main, 0.2, None).unwrap()
        );
    }

    #[test]
    fn unknown_kind_rejected() {
        let text = minimal_toml().replace("kind = \"bernoulli\"", "kind = \"poisson\"");
        let err = resolve_str(&text).unwrap_err();
        assert!(err.to_string().contains("instance.kind"), "{err}");
    }

    #[test]
    fn invalid_mean_names_field() {
        let text = minimal_toml().replace("means = [0.5, 0.25]", "means = [0.5, 1.25]");
        let err = resolve_str(&text).unwrap_err();
        assert!(err.to_string().contains("instance.means"), "{err}");
    }

    #[test]
    fn gaussian_defaults_stddev() {
        let text = minimal_toml().replace("kind = \"bernoulli\"", "kind = \"gaussian\"");
        let cfg = resolve_str(&text).unwrap();
        match cfg.instance {
            InstanceSpec::Synthetic(instance) => {
                assert_eq!(
                    instance.arm(0),
                    &ArmDistribution::gaussian(0.5, 1.0).unwrap()
                );
            }
            _ => panic!("expected synthetic instance"),
        }
    }
}
