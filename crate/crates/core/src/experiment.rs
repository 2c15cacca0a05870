//! Config-driven commands behind the `rmab` binary.
//!
//! A config is a JSON document:
//!
//! ```json
//! {
//!   "name": "circulant",
//!   "instance": {"generator": "circulant", "n_arms": 5, "budget": 1, "seed": 0},
//!   "policies": ["wiql", "opt", {"fu": {"lambdas": [-1, 0, 1]}}],
//!   "horizon": 10000, "trials": 30, "base_seed": 0,
//!   "out_dir": "out", "window": 1,
//!   "solver": {"mode": "average_reward"}
//! }
//! ```
//!
//! `run` writes `<name>_<policy>_raw.csv` and `<name>_<policy>_agg.csv` per
//! policy plus `manifest.json`; `index` writes `<name>_index.csv`.

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::instances::{self, MaternalCounts, MaternalShape, MentoringParams, RestartParams};
use crate::mdp::RmabInstance;
use crate::policy::{parse_policy, PolicyConfig};
use crate::sim::{self, aggregate, run_trials};
use crate::whittle::{index_tables, SolverParams};

fn d_arms() -> usize {
    5
}
fn d_budget() -> usize {
    1
}
fn d_maternal_budget() -> usize {
    10
}
fn d_change_week() -> u64 {
    28
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSpec {
    Circulant {
        #[serde(default = "d_arms")]
        n_arms: usize,
        #[serde(default = "d_budget")]
        budget: usize,
        #[serde(default)]
        seed: u64,
    },
    Restart {
        #[serde(default = "d_arms")]
        n_arms: usize,
        #[serde(default = "d_budget")]
        budget: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        params: RestartParams,
    },
    Mentoring {
        #[serde(default = "d_arms")]
        n_arms: usize,
        #[serde(default = "d_budget")]
        budget: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        params: MentoringParams,
    },
    MentoringSeparated {
        #[serde(default = "d_arms")]
        n_arms: usize,
        #[serde(default = "d_budget")]
        budget: usize,
        #[serde(default)]
        seed: u64,
    },
    MaternalStatic {
        #[serde(default)]
        counts: MaternalCounts,
        #[serde(default = "d_maternal_budget")]
        budget: usize,
        #[serde(default)]
        shape: MaternalShape,
    },
    MaternalDynamic {
        #[serde(default)]
        counts: MaternalCounts,
        #[serde(default = "d_maternal_budget")]
        budget: usize,
        #[serde(default = "d_change_week")]
        change_week: u64,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        shape: MaternalShape,
    },
    ActionSymmetric {
        #[serde(default = "d_arms")]
        n_arms: usize,
        #[serde(default = "d_budget")]
        budget: usize,
    },
    NonIndexable {
        #[serde(default = "d_arms")]
        n_arms: usize,
        #[serde(default = "d_budget")]
        budget: usize,
    },
    File {
        path: PathBuf,
    },
}

/// Generator names with a one-line description.
pub const GENERATORS: [(&str, &str); 9] = [
    ("circulant", "4-state circulant dynamics, rewards (-1, 0, 0, 1)"),
    ("restart", "5-state arms; the active action restarts to state 0, reward 0.9^z"),
    ("mentoring", "10-state band matrix, reward sqrt(z/10), literal parameters"),
    ("mentoring_separated", "mentoring with upward drift when active, downward when passive"),
    ("maternal_static", "3-state S/P/L engagement arms, categories A/B/C (10/10/30)"),
    ("maternal_dynamic", "maternal_static with a category shift at change_week (28)"),
    ("action_symmetric", "3-state arms whose actions coincide; all indices are 0"),
    ("non_indexable", "3-state arms whose passive set is not monotone in the subsidy"),
    ("file", "an instance JSON file: {\"generator\": \"file\", \"path\": ...}"),
];

impl InstanceSpec {
    pub fn generator(&self) -> &'static str {
        match self {
            InstanceSpec::Circulant { .. } => "circulant",
            InstanceSpec::Restart { .. } => "restart",
            InstanceSpec::Mentoring { .. } => "mentoring",
            InstanceSpec::MentoringSeparated { .. } => "mentoring_separated",
            InstanceSpec::MaternalStatic { .. } => "maternal_static",
            InstanceSpec::MaternalDynamic { .. } => "maternal_dynamic",
            InstanceSpec::ActionSymmetric { .. } => "action_symmetric",
            InstanceSpec::NonIndexable { .. } => "non_indexable",
            InstanceSpec::File { .. } => "file",
        }
    }

    /// Spec with every parameter at its default.
    pub fn from_generator(name: &str) -> Result<Self> {
        serde_json::from_value(serde_json::json!({ "generator": name }))
            .map_err(|e| Error::Config(format!("instance generator '{name}': {e}")))
    }

    pub fn build(&self) -> Result<RmabInstance> {
        let identical = |arm, n: usize, budget| RmabInstance::new(vec![arm; n], budget, vec![0; n], Vec::new());
        let check = |n: usize, budget: usize| {
            if budget < 1 || budget > n {
                Err(Error::Config(format!("budget {budget} must satisfy 1 ≤ M ≤ N = {n}")))
            } else {
                Ok(())
            }
        };
        Ok(match self {
            InstanceSpec::Circulant { n_arms, budget, seed } => {
                check(*n_arms, *budget)?;
                instances::circulant(*n_arms, *budget, *seed)
            }
            InstanceSpec::Restart { n_arms, budget, seed, params } => {
                check(*n_arms, *budget)?;
                instances::restart(*n_arms, *budget, *seed, params)
            }
            InstanceSpec::Mentoring { n_arms, budget, seed, params } => {
                check(*n_arms, *budget)?;
                instances::mentoring(*n_arms, *budget, *seed, params)
            }
            InstanceSpec::MentoringSeparated { n_arms, budget, seed } => {
                check(*n_arms, *budget)?;
                instances::mentoring(*n_arms, *budget, *seed, &MentoringParams::separated())
            }
            InstanceSpec::MaternalStatic { counts, budget, shape } => {
                instances::maternal_static(counts, *budget, shape)?
            }
            InstanceSpec::MaternalDynamic { counts, budget, change_week, seed, shape } => {
                instances::maternal_dynamic(counts, *budget, *change_week, *seed, shape)?
            }
            InstanceSpec::ActionSymmetric { n_arms, budget } => {
                identical(instances::action_symmetric_arm(), *n_arms, *budget)?
            }
            InstanceSpec::NonIndexable { n_arms, budget } => {
                identical(instances::non_indexable_arm(), *n_arms, *budget)?
            }
            InstanceSpec::File { path } => instances::load(path)?,
        })
    }
}

fn d_policies() -> Vec<PolicyConfig> {
    vec![PolicyConfig::from_name("wiql").expect("known policy")]
}
fn d_horizon() -> u64 {
    1000
}
fn d_trials() -> usize {
    30
}
fn d_out() -> PathBuf {
    PathBuf::from("out")
}
fn d_window() -> usize {
    1
}

fn de_policies<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<PolicyConfig>, D::Error> {
    let values = Vec::<serde_json::Value>::deserialize(d)?;
    values
        .into_iter()
        .map(|v| parse_policy(v).map_err(serde::de::Error::custom))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Label used in file names and CSV rows; defaults to the generator name.
    #[serde(default)]
    pub name: Option<String>,
    pub instance: InstanceSpec,
    #[serde(default = "d_policies", deserialize_with = "de_policies")]
    pub policies: Vec<PolicyConfig>,
    #[serde(default = "d_horizon", alias = "T")]
    pub horizon: u64,
    #[serde(default = "d_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Overrides the instance budget.
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default = "d_out")]
    pub out_dir: PathBuf,
    #[serde(default = "d_window")]
    pub window: usize,
    #[serde(default)]
    pub solver: SolverParams,
}

impl ExperimentConfig {
    pub fn for_instance(instance: InstanceSpec) -> Self {
        Self {
            name: None,
            instance,
            policies: d_policies(),
            horizon: d_horizon(),
            trials: d_trials(),
            base_seed: 0,
            budget: None,
            out_dir: d_out(),
            window: d_window(),
            solver: SolverParams::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Reads a config file; a relative instance file path is resolved against
    /// the config's directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Load {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut cfg = Self::from_json(&text).map_err(|e| Error::Load {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if let InstanceSpec::File { path: inst } = &mut cfg.instance {
            if inst.is_relative() {
                if let Some(dir) = path.parent() {
                    *inst = dir.join(&*inst);
                }
            }
        }
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::Config("horizon T must be at least 1".into()));
        }
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.window < 1 {
            return Err(Error::Config("window must be at least 1".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::Config("at least one policy is required".into()));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| self.instance.generator().to_string())
    }

    pub fn build_instance(&self) -> Result<RmabInstance> {
        let inst = self.instance.build()?;
        match self.budget {
            Some(b) => inst.with_budget(b),
            None => Ok(inst),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexRow {
    pub arm: usize,
    pub state: usize,
    pub lambda_star: f64,
}

/// Writes `<out>/<name>_index.csv` with columns `arm,state,lambda_star`.
pub fn cmd_index(config: &ExperimentConfig) -> Result<(PathBuf, Vec<IndexRow>)> {
    config.check()?;
    let inst = config.build_instance()?;
    let tables = index_tables(&inst.arms, &config.solver)?;
    let rows: Vec<IndexRow> = tables
        .iter()
        .enumerate()
        .flat_map(|(arm, table)| {
            table.0.iter().enumerate().map(move |(state, &lambda_star)| IndexRow {
                arm,
                state,
                lambda_star,
            })
        })
        .collect();
    std::fs::create_dir_all(&config.out_dir)?;
    let path = config.out_dir.join(format!("{}_index.csv", config.label()));
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&path)?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok((path, rows))
}

#[derive(Debug, Clone, Serialize)]
pub struct PolicyRun {
    pub policy: String,
    pub raw: PathBuf,
    pub agg: PathBuf,
    pub seeds: Vec<u64>,
    pub final_window_mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub version: String,
    pub instance: String,
    pub n_arms: usize,
    pub budget: usize,
    pub config: ExperimentConfig,
    pub runs: Vec<PolicyRun>,
}

pub const MANIFEST: &str = "manifest.json";

/// Runs every configured policy and writes raw/aggregate CSVs plus a manifest.
pub fn cmd_run(config: &ExperimentConfig) -> Result<Manifest> {
    config.check()?;
    let inst = config.build_instance()?;
    let label = config.label();
    std::fs::create_dir_all(&config.out_dir)?;
    let mut runs = Vec::new();
    for policy in &config.policies {
        let proto = policy.build(&inst, &config.solver)?;
        let logs = run_trials(&inst, |_| Ok(proto.clone()), config.horizon, config.trials, config.base_seed)?;
        let series = aggregate(&logs, config.window)?;

        let name = policy.name();
        let raw = config.out_dir.join(format!("{label}_{name}_raw.csv"));
        let agg = config.out_dir.join(format!("{label}_{name}_agg.csv"));
        sim::write_raw_csv(BufWriter::new(File::create(&raw)?), &label, name, &logs)?;
        sim::write_agg_csv(BufWriter::new(File::create(&agg)?), &label, name, &series)?;
        runs.push(PolicyRun {
            policy: name.to_string(),
            raw,
            agg,
            seeds: logs.iter().map(|l| l.seed).collect(),
            final_window_mean: sim::tail_mean(&series.mean, 0.2),
        });
    }
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        instance: label,
        n_arms: inst.n_arms(),
        budget: inst.budget,
        config: config.clone(),
        runs,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(config.out_dir.join(MANIFEST), text)?;
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
struct AggRecord {
    instance: String,
    policy: String,
    #[allow(dead_code)]
    t: usize,
    mean: f64,
    stderr: f64,
    #[allow(dead_code)]
    moving_avg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub instance: String,
    pub policy: String,
    /// Mean of the per-step mean reward over the window.
    pub mean: f64,
    /// Mean of the per-step standard errors over the window.
    pub stderr: f64,
    pub steps: usize,
}

/// Summarises aggregate CSVs over their final `fraction` of steps, best first.
pub fn cmd_compare(paths: &[PathBuf], fraction: f64) -> Result<Vec<ComparisonRow>> {
    if paths.is_empty() {
        return Err(Error::Config("compare needs at least one aggregate CSV".into()));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(format!(
            "window fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let mut rows = Vec::new();
    for path in paths {
        let load_err = |message: String| Error::Load {
            path: path.clone(),
            message,
        };
        let mut reader = csv::Reader::from_path(path).map_err(|e| load_err(e.to_string()))?;
        let records: Vec<AggRecord> = reader
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| load_err(e.to_string()))?;
        if records.is_empty() {
            return Err(load_err("no rows".into()));
        }
        let k = (records.len() as f64 * fraction).floor() as usize;
        if k == 0 {
            return Err(Error::Config(format!(
                "window fraction {fraction} of {} steps is empty",
                records.len()
            )));
        }
        let tail = &records[records.len() - k..];
        rows.push(ComparisonRow {
            instance: records[0].instance.clone(),
            policy: records[0].policy.clone(),
            mean: tail.iter().map(|r| r.mean).sum::<f64>() / k as f64,
            stderr: tail.iter().map(|r| r.stderr).sum::<f64>() / k as f64,
            steps: k,
        });
    }
    rows.sort_by(|a, b| b.mean.total_cmp(&a.mean));
    Ok(rows)
}

pub fn format_comparison(rows: &[ComparisonRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<20} {:<10} {:>12} {:>12} {:>7}", "instance", "policy", "mean", "stderr", "steps");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<20} {:<10} {:>12.4} {:>12.4} {:>7}",
            r.instance, r.policy, r.mean, r.stderr, r.steps
        );
    }
    out
}

pub fn format_instance_list() -> String {
    let mut out = String::new();
    for (name, about) in GENERATORS {
        let _ = writeln!(out, "{name:<20} {about}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"instance": {"generator": "circulant"}}"#).unwrap();
        assert_eq!(cfg.horizon, 1000);
        assert_eq!(cfg.trials, 30);
        assert_eq!(cfg.label(), "circulant");
        assert_eq!(cfg.policies, vec![PolicyConfig::from_name("wiql").unwrap()]);
        let inst = cfg.build_instance().unwrap();
        assert_eq!((inst.n_arms(), inst.budget), (5, 1));
    }

    #[test]
    fn t_alias_and_budget_override() {
        let cfg = ExperimentConfig::from_json(
            r#"{"instance": {"generator": "maternal_static"}, "T": 80, "budget": 5, "policies": ["random", {"greedy": {}}]}"#,
        )
        .unwrap();
        assert_eq!(cfg.horizon, 80);
        assert_eq!(cfg.build_instance().unwrap().budget, 5);
        assert_eq!(cfg.policies.len(), 2);
    }

    #[test]
    fn config_errors() {
        assert!(ExperimentConfig::from_json(r#"{"instance": {"generator": "nope"}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"instance": {"generator": "circulant"}, "policies": ["ucb"]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"instance": {"generator": "circulant"}, "trials": 0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"instance": {"generator": "circulant"}, "T": 0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"instance": {"generator": "circulant", "budget": 9}}"#)
            .unwrap()
            .build_instance()
            .is_err());
    }

    #[test]
    fn every_listed_generator_parses() {
        for (name, _) in GENERATORS {
            if name == "file" {
                assert!(InstanceSpec::from_generator(name).is_err());
                continue;
            }
            let spec = InstanceSpec::from_generator(name).unwrap();
            assert_eq!(spec.generator(), name);
            spec.build().unwrap();
        }
    }
}
