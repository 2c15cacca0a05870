//! Two-timescale Whittle-index Q-learning in the style of Avrachenkov and
//! Borkar, with Q-values kept separately for each arm.
//!
//! Fast timescale, for the visited cell of arm `i`:
//!
//! ```text
//! Q_i(z, a) ← Q_i(z, a) + α·(r + (1 - a)·λ̄_i + γ·max_a' Q_i(z', a') - f(Q_i) - Q_i(z, a))
//! ```
//!
//! where `f(Q_i)` is the mean of all of arm `i`'s Q-values (the relative
//! value iteration offset). Slow timescale: `λ̄_i ← λ̄_i + β_t·(Q_i(z, 1) - Q_i(z, 0))`
//! with `β_t = 1 / (1 + t·ln(t + 2) / scale)`. Arms are ranked by `λ̄_i`.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::qtable::{LearningRate, QTable};
use super::select::{check_budget, random_subset, top_m};
use super::wiql::{check_observation, Exploration};
use crate::error::Result;
use crate::mdp::Action;
use crate::rng::Stream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AbConfig {
    pub exploration: Exploration,
    pub learning_rate: LearningRate,
    /// `scale` in the slow step size `1 / (1 + t·ln(t + 2) / scale)`.
    pub slow_scale: f64,
    pub discount: f64,
    /// Steps averaged by [`Ab::slow_residual`].
    pub residual_window: usize,
}

impl Default for AbConfig {
    fn default() -> Self {
        Self {
            exploration: Exploration::Decay,
            learning_rate: LearningRate::Visits,
            slow_scale: 100.0,
            discount: 1.0,
            residual_window: 500,
        }
    }
}

impl AbConfig {
    #[inline]
    pub fn slow_rate(&self, t: u64) -> f64 {
        let t = t as f64;
        1.0 / (1.0 + t * (t + 2.0).ln() / self.slow_scale)
    }
}

#[derive(Debug, Clone)]
pub struct Ab {
    pub config: AbConfig,
    pub table: QTable,
    reference: Vec<f64>,
    budget: usize,
    t: u64,
    // signed drift Q(z,1) - Q(z,0) per arm, one entry per step
    drift: VecDeque<Vec<f64>>,
}

impl Ab {
    pub fn new(states_per_arm: impl IntoIterator<Item = usize>, budget: usize, config: AbConfig) -> Result<Self> {
        let table = QTable::new(states_per_arm);
        check_budget(table.n_arms(), budget)?;
        let n = table.n_arms();
        Ok(Self {
            config,
            table,
            reference: vec![0.0; n],
            budget,
            t: 0,
            drift: VecDeque::new(),
        })
    }

    pub fn reference(&self, arm: usize) -> f64 {
        self.reference[arm]
    }

    pub fn select(&mut self, observed: &[usize], t: u64, rng: &mut Stream) -> Result<Vec<usize>> {
        let n = self.table.n_arms();
        check_observation(observed, n, t)?;
        self.t = t;
        if self.config.residual_window > 0 {
            if self.drift.len() == self.config.residual_window {
                self.drift.pop_front();
            }
            self.drift.push_back(vec![0.0; n]);
        }
        if rng.random::<f64>() < self.config.exploration.epsilon(n, t) {
            return random_subset(n, self.budget, rng);
        }
        top_m(&self.reference, self.budget, rng)
    }

    pub fn update(&mut self, arm: usize, state: usize, action: Action, reward: f64, next: usize) {
        let subsidy = if action == Action::Passive { self.reference[arm] } else { 0.0 };
        let target = reward + subsidy + self.config.discount * self.table.max_q(arm, next)
            - self.table.mean_q(arm);
        self.table.learn(arm, state, action, target, self.config.learning_rate);
        let d = self.table.lambda_est(arm, state);
        self.reference[arm] += self.config.slow_rate(self.t.max(1)) * d;
        if let Some(step) = self.drift.back_mut() {
            step[arm] = d;
        }
    }

    /// Mean over arms of `|average drift|` across the last
    /// `residual_window` steps. The slow iterate is at rest when the drift
    /// averages to zero.
    pub fn slow_residual(&self) -> f64 {
        let n = self.table.n_arms();
        if self.drift.is_empty() || n == 0 {
            return 0.0;
        }
        let len = self.drift.len() as f64;
        (0..n)
            .map(|i| (self.drift.iter().map(|s| s[i]).sum::<f64>() / len).abs())
            .sum::<f64>()
            / n as f64
    }
}
