//! Whittle-index Q-learning.
//!
//! Every arm keeps its own Q-table. Each step the policy explores with
//! probability `ε = N / (N + t)` by activating a uniformly random M-subset,
//! and otherwise activates the M arms whose current index estimate
//! `Q(z, 1) - Q(z, 0)` is largest. All arms learn every step:
//!
//! ```text
//! Q(z, a) ← (1 - α)·Q(z, a) + α·(r + γ·max_a' Q(z', a'))
//! ```
//!
//! with `α = 1/(c + 1)` for the post-increment visit count `c` of `(z, a)`
//! and `γ = 1` by default.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::qtable::{LearningRate, QTable};
use super::select::{check_budget, random_subset, top_m};
use crate::error::{Error, Result};
use crate::mdp::Action;
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exploration {
    /// `N / (N + t)`.
    #[default]
    Decay,
    Constant(f64),
}

impl Exploration {
    #[inline]
    pub fn epsilon(self, n_arms: usize, t: u64) -> f64 {
        match self {
            Exploration::Decay => n_arms as f64 / (n_arms as f64 + t as f64),
            Exploration::Constant(e) => e,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WiqlConfig {
    pub exploration: Exploration,
    pub learning_rate: LearningRate,
    pub discount: f64,
}

impl Default for WiqlConfig {
    fn default() -> Self {
        Self {
            exploration: Exploration::Decay,
            learning_rate: LearningRate::Visits,
            discount: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Wiql {
    pub config: WiqlConfig,
    pub table: QTable,
    budget: usize,
    last_explored: bool,
}

impl Wiql {
    pub fn new(states_per_arm: impl IntoIterator<Item = usize>, budget: usize, config: WiqlConfig) -> Result<Self> {
        let table = QTable::new(states_per_arm);
        check_budget(table.n_arms(), budget)?;
        Ok(Self {
            config,
            table,
            budget,
            last_explored: false,
        })
    }

    /// Whether the most recent selection took the exploration branch.
    pub fn last_explored(&self) -> bool {
        self.last_explored
    }

    pub fn select(&mut self, observed: &[usize], t: u64, rng: &mut Stream) -> Result<Vec<usize>> {
        let n = self.table.n_arms();
        check_observation(observed, n, t)?;
        let eps = self.config.exploration.epsilon(n, t);
        self.last_explored = rng.random::<f64>() < eps;
        if self.last_explored {
            return random_subset(n, self.budget, rng);
        }
        let scores: Vec<f64> = observed
            .iter()
            .enumerate()
            .map(|(i, &z)| self.table.lambda_est(i, z))
            .collect();
        top_m(&scores, self.budget, rng)
    }

    /// Returns the step size applied.
    pub fn update(&mut self, arm: usize, state: usize, action: Action, reward: f64, next: usize) -> f64 {
        let target = reward + self.config.discount * self.table.max_q(arm, next);
        self.table.learn(arm, state, action, target, self.config.learning_rate)
    }
}

pub(crate) fn check_observation(observed: &[usize], n: usize, t: u64) -> Result<()> {
    if observed.len() != n {
        return Err(Error::Contract(format!("observed {} states for {n} arms", observed.len())));
    }
    if t < 1 {
        return Err(Error::Contract("steps are numbered from 1".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn fresh(n: usize, m: usize) -> Wiql {
        Wiql::new(vec![3; n], m, WiqlConfig::default()).unwrap()
    }

    #[test]
    fn epsilon_at_first_step() {
        let e = Exploration::Decay.epsilon(100, 1);
        assert!((e - 100.0 / 101.0).abs() < 1e-15);
        assert!((e - 0.9901).abs() < 1e-4);
    }

    #[test]
    fn first_visit_uses_half_step() {
        let mut w = fresh(2, 1);
        let alpha = w.update(0, 1, Action::Active, 1.0, 2);
        assert_eq!(alpha, 0.5);
        assert_eq!(w.table.q(0, 1, Action::Active), 0.5);
        assert_eq!(w.table.lambda_est(0, 1), 0.5);
    }

    #[test]
    fn zero_step_keeps_value() {
        let mut w = fresh(1, 1);
        w.config.learning_rate = LearningRate::Constant(0.0);
        w.table.set_q(0, 0, Action::Passive, 0.7);
        w.update(0, 0, Action::Passive, 5.0, 1);
        assert_eq!(w.table.q(0, 0, Action::Passive), 0.7);
    }

    #[test]
    fn unit_step_overwrites() {
        let mut w = fresh(1, 1);
        w.config.learning_rate = LearningRate::Constant(1.0);
        w.table.set_q(0, 2, Action::Active, 3.0);
        w.table.set_q(0, 0, Action::Active, -4.0);
        w.update(0, 0, Action::Active, 2.0, 2);
        assert_eq!(w.table.q(0, 0, Action::Active), 5.0);
    }

    #[test]
    fn greedy_branch_takes_top_estimates() {
        let mut w = Wiql::new(vec![1; 5], 2, WiqlConfig { exploration: Exploration::Constant(0.0), ..Default::default() }).unwrap();
        for (arm, v) in [5.0, 1.0, 3.0, -2.0, 0.0].into_iter().enumerate() {
            w.table.set_q(arm, 0, Action::Active, v);
        }
        let mut r = rng::split(4, 0);
        assert_eq!(w.select(&[0; 5], 10, &mut r).unwrap(), vec![0, 2]);
        assert!(!w.last_explored());
    }

    #[test]
    fn all_zero_estimates_cover_many_subsets() {
        let mut w = Wiql::new(vec![3; 4], 2, WiqlConfig { exploration: Exploration::Constant(0.0), ..Default::default() }).unwrap();
        let mut r = rng::split(5, 0);
        let mut subsets = std::collections::BTreeSet::new();
        for _ in 0..200 {
            subsets.insert(w.select(&[0; 4], 1, &mut r).unwrap());
        }
        assert_eq!(subsets.len(), 6);
    }

    #[test]
    fn contract_errors() {
        assert!(Wiql::new(vec![2; 2], 3, WiqlConfig::default()).is_err());
        let mut w = fresh(3, 1);
        let mut r = rng::split(0, 0);
        assert!(w.select(&[0, 0], 1, &mut r).is_err());
        assert!(w.select(&[0, 0, 0], 0, &mut r).is_err());
    }
}
