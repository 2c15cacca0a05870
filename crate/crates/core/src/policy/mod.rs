//! Arm-selection policies.
//!
//! Every policy follows the same two-call contract per step: [`Policy::select`]
//! returns exactly `M` distinct arms given the observed states, and
//! [`Policy::update`] is then called once for every arm (active or not) with
//! the observed transition.

pub mod ab;
pub mod fu;
pub mod greedy;
pub mod myopic;
pub mod opt;
pub mod qtable;
pub mod select;
pub mod wiql;

use serde::{Deserialize, Serialize};

pub use ab::{Ab, AbConfig};
pub use fu::{Fu, FuConfig};
pub use greedy::Greedy;
pub use myopic::Myopic;
pub use opt::Opt;
pub use qtable::{LearningRate, QTable};
pub use select::{random_subset, top_m};
pub use wiql::{Exploration, Wiql, WiqlConfig};

use crate::error::{Error, Result};
use crate::mdp::{Action, ArmMdp, RmabInstance};
use crate::rng::Stream;
use crate::whittle::SolverParams;

pub trait Policy {
    /// The arms to activate at step `t ≥ 1`, ascending.
    fn select(&mut self, observed: &[usize], t: u64, rng: &mut Stream) -> Result<Vec<usize>>;

    fn update(&mut self, arm: usize, state: usize, action: Action, reward: f64, next: usize);

    /// Called when the instance schedule swaps an arm's MDP.
    fn arm_replaced(&mut self, _arm: usize, _mdp: &ArmMdp) -> Result<()> {
        Ok(())
    }
}

/// Uniformly random `M`-subset every step.
#[derive(Debug, Clone)]
pub struct RandomPolicy {
    n_arms: usize,
    budget: usize,
}

impl RandomPolicy {
    pub fn new(n_arms: usize, budget: usize) -> Result<Self> {
        select::check_budget(n_arms, budget)?;
        Ok(Self { n_arms, budget })
    }

    pub fn select(&self, observed: &[usize], t: u64, rng: &mut Stream) -> Result<Vec<usize>> {
        wiql::check_observation(observed, self.n_arms, t)?;
        random_subset(self.n_arms, self.budget, rng)
    }
}

/// A policy together with all of its mutable state.
#[derive(Debug, Clone)]
pub enum PolicyState {
    Wiql(Wiql),
    Opt(Opt),
    Ab(Ab),
    Fu(Fu),
    Greedy(Greedy),
    Random(RandomPolicy),
    Myopic(Myopic),
}

impl PolicyState {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyState::Wiql(_) => "wiql",
            PolicyState::Opt(_) => "opt",
            PolicyState::Ab(_) => "ab",
            PolicyState::Fu(_) => "fu",
            PolicyState::Greedy(_) => "greedy",
            PolicyState::Random(_) => "random",
            PolicyState::Myopic(_) => "myopic",
        }
    }
}

impl Policy for PolicyState {
    fn select(&mut self, observed: &[usize], t: u64, rng: &mut Stream) -> Result<Vec<usize>> {
        match self {
            PolicyState::Wiql(p) => p.select(observed, t, rng),
            PolicyState::Opt(p) => p.select(observed, t, rng),
            PolicyState::Ab(p) => p.select(observed, t, rng),
            PolicyState::Fu(p) => p.select(observed, t, rng),
            PolicyState::Greedy(p) => p.select(observed, t, rng),
            PolicyState::Random(p) => p.select(observed, t, rng),
            PolicyState::Myopic(p) => p.select(observed, t, rng),
        }
    }

    fn update(&mut self, arm: usize, state: usize, action: Action, reward: f64, next: usize) {
        match self {
            PolicyState::Wiql(p) => {
                p.update(arm, state, action, reward, next);
            }
            PolicyState::Ab(p) => p.update(arm, state, action, reward, next),
            PolicyState::Fu(p) => p.update(arm, state, action, reward, next),
            PolicyState::Greedy(p) => p.update(arm, state, action, reward),
            PolicyState::Opt(_) | PolicyState::Random(_) | PolicyState::Myopic(_) => {}
        }
    }

    fn arm_replaced(&mut self, arm: usize, mdp: &ArmMdp) -> Result<()> {
        match self {
            PolicyState::Opt(p) => p.arm_replaced(arm, mdp),
            PolicyState::Myopic(p) => {
                p.arm_replaced(arm, mdp);
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptConfig {
    /// Overrides the experiment-wide solver settings.
    pub solver: Option<SolverParams>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NoParams {}

/// A policy name plus its hyperparameters, as written in experiment configs:
/// either the bare name (`"wiql"`) or `{"wiql": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyConfig {
    Wiql(WiqlConfig),
    Opt(OptConfig),
    Ab(AbConfig),
    Fu(FuConfig),
    Greedy(NoParams),
    Random(NoParams),
    Myopic(NoParams),
}

pub const POLICY_NAMES: [&str; 7] = ["wiql", "opt", "ab", "fu", "greedy", "random", "myopic"];

impl PolicyConfig {
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "wiql" => PolicyConfig::Wiql(WiqlConfig::default()),
            "opt" => PolicyConfig::Opt(OptConfig::default()),
            "ab" => PolicyConfig::Ab(AbConfig::default()),
            "fu" => PolicyConfig::Fu(FuConfig::default()),
            "greedy" => PolicyConfig::Greedy(NoParams {}),
            "random" => PolicyConfig::Random(NoParams {}),
            "myopic" => PolicyConfig::Myopic(NoParams {}),
            other => {
                return Err(Error::Config(format!(
                    "unknown policy '{other}' (expected one of {})",
                    POLICY_NAMES.join("|")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            PolicyConfig::Wiql(_) => "wiql",
            PolicyConfig::Opt(_) => "opt",
            PolicyConfig::Ab(_) => "ab",
            PolicyConfig::Fu(_) => "fu",
            PolicyConfig::Greedy(_) => "greedy",
            PolicyConfig::Random(_) => "random",
            PolicyConfig::Myopic(_) => "myopic",
        }
    }

    /// Fresh policy state for one episode on `instance`.
    pub fn build(&self, instance: &RmabInstance, solver: &SolverParams) -> Result<PolicyState> {
        let sizes = || instance.arms.iter().map(ArmMdp::n_states);
        let m = instance.budget;
        Ok(match self {
            PolicyConfig::Wiql(c) => PolicyState::Wiql(Wiql::new(sizes(), m, c.clone())?),
            PolicyConfig::Opt(c) => PolicyState::Opt(Opt::new(instance, c.solver.as_ref().unwrap_or(solver))?),
            PolicyConfig::Ab(c) => PolicyState::Ab(Ab::new(sizes(), m, c.clone())?),
            PolicyConfig::Fu(c) => {
                let sizes: Vec<usize> = sizes().collect();
                PolicyState::Fu(Fu::new(sizes, m, c.clone())?)
            }
            PolicyConfig::Greedy(_) => PolicyState::Greedy(Greedy::new(sizes(), m)?),
            PolicyConfig::Random(_) => PolicyState::Random(RandomPolicy::new(instance.n_arms(), m)?),
            PolicyConfig::Myopic(_) => PolicyState::Myopic(Myopic::new(instance)?),
        })
    }
}

/// Accepts `"name"` as shorthand for `{"name": {}}`.
pub fn parse_policy(value: serde_json::Value) -> Result<PolicyConfig> {
    match value {
        serde_json::Value::String(name) => PolicyConfig::from_name(&name),
        other => serde_json::from_value(other).map_err(|e| Error::Config(format!("policy: {e}"))),
    }
}
