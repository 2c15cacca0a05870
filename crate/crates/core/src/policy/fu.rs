//! Subsidy-grid Q-learning in the style of Fu et al.
//!
//! For every subsidy `λ` in a fixed grid each arm learns its own Q-table on
//! the reward `r + λ·1{a = 0}`. An arm's index estimate in state `z` is the
//! grid subsidy whose Q-gap `|Q_λ(z, 1) - Q_λ(z, 0)|` is smallest (first
//! in grid order on ties).

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::qtable::{LearningRate, QTable};
use super::select::{check_budget, random_subset, top_m};
use super::wiql::{check_observation, Exploration};
use crate::error::{Error, Result};
use crate::mdp::Action;
use crate::rng::Stream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FuConfig {
    pub lambdas: Vec<f64>,
    pub exploration: Exploration,
    pub learning_rate: LearningRate,
    pub discount: f64,
}

impl Default for FuConfig {
    fn default() -> Self {
        Self {
            lambdas: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            exploration: Exploration::Decay,
            learning_rate: LearningRate::Visits,
            discount: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fu {
    pub config: FuConfig,
    /// One table per grid subsidy, in grid order.
    pub layers: Vec<QTable>,
    budget: usize,
}

impl Fu {
    pub fn new(states_per_arm: impl IntoIterator<Item = usize> + Clone, budget: usize, config: FuConfig) -> Result<Self> {
        if config.lambdas.is_empty() {
            return Err(Error::Contract("subsidy grid must not be empty".into()));
        }
        let layers: Vec<QTable> = config
            .lambdas
            .iter()
            .map(|_| QTable::new(states_per_arm.clone()))
            .collect();
        check_budget(layers[0].n_arms(), budget)?;
        Ok(Self { config, layers, budget })
    }

    /// Grid subsidy with the smallest Q-gap for `arm` in `state`.
    pub fn lambda_min(&self, arm: usize, state: usize) -> f64 {
        let mut best = (f64::INFINITY, self.config.lambdas[0]);
        for (layer, &lambda) in self.layers.iter().zip(&self.config.lambdas) {
            let gap = layer.lambda_est(arm, state).abs();
            if gap < best.0 {
                best = (gap, lambda);
            }
        }
        best.1
    }

    pub fn select(&self, observed: &[usize], t: u64, rng: &mut Stream) -> Result<Vec<usize>> {
        let n = self.layers[0].n_arms();
        check_observation(observed, n, t)?;
        if rng.random::<f64>() < self.config.exploration.epsilon(n, t) {
            return random_subset(n, self.budget, rng);
        }
        let scores: Vec<f64> = observed.iter().enumerate().map(|(i, &z)| self.lambda_min(i, z)).collect();
        top_m(&scores, self.budget, rng)
    }

    pub fn update(&mut self, arm: usize, state: usize, action: Action, reward: f64, next: usize) {
        for (layer, &lambda) in self.layers.iter_mut().zip(&self.config.lambdas) {
            let subsidy = if action == Action::Passive { lambda } else { 0.0 };
            let target = reward + subsidy + self.config.discount * layer.max_q(arm, next);
            layer.learn(arm, state, action, target, self.config.learning_rate);
        }
    }
}
