use serde::{Deserialize, Serialize};

use crate::mdp::Action;

/// Step size applied to a visited `(arm, state, action)` cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearningRate {
    /// `1 / (c + 1)` with `c` the visit count after incrementing.
    #[default]
    Visits,
    Constant(f64),
}

impl LearningRate {
    #[inline]
    pub fn alpha(self, visits: u64) -> f64 {
        match self {
            LearningRate::Visits => 1.0 / (visits as f64 + 1.0),
            LearningRate::Constant(a) => a,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct ArmTable {
    q: Vec<[f64; 2]>,
    counts: Vec<[u64; 2]>,
    lambda: Vec<f64>,
}

/// Per-arm tabular Q-values with visit counts and the index estimate
/// `λ(z) = Q(z, 1) - Q(z, 0)`, kept in sync on every update.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    arms: Vec<ArmTable>,
}

impl QTable {
    pub fn new(states_per_arm: impl IntoIterator<Item = usize>) -> Self {
        Self {
            arms: states_per_arm
                .into_iter()
                .map(|n| ArmTable {
                    q: vec![[0.0; 2]; n],
                    counts: vec![[0; 2]; n],
                    lambda: vec![0.0; n],
                })
                .collect(),
        }
    }

    pub fn n_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn n_states(&self, arm: usize) -> usize {
        self.arms[arm].q.len()
    }

    #[inline]
    pub fn q(&self, arm: usize, state: usize, action: Action) -> f64 {
        self.arms[arm].q[state][action.index()]
    }

    #[inline]
    pub fn max_q(&self, arm: usize, state: usize) -> f64 {
        let [p, a] = self.arms[arm].q[state];
        p.max(a)
    }

    pub fn count(&self, arm: usize, state: usize, action: Action) -> u64 {
        self.arms[arm].counts[state][action.index()]
    }

    #[inline]
    pub fn lambda_est(&self, arm: usize, state: usize) -> f64 {
        self.arms[arm].lambda[state]
    }

    /// Sum of all visit counts of one arm.
    pub fn visits(&self, arm: usize) -> u64 {
        self.arms[arm].counts.iter().map(|c| c[0] + c[1]).sum()
    }

    /// Mean Q-value over every cell of one arm.
    pub fn mean_q(&self, arm: usize) -> f64 {
        let t = &self.arms[arm];
        t.q.iter().map(|c| c[0] + c[1]).sum::<f64>() / (2 * t.q.len()) as f64
    }

    /// Counts the visit, then moves `Q(state, action)` toward `target` with
    /// the resulting step size. Returns the step size used.
    pub fn learn(&mut self, arm: usize, state: usize, action: Action, target: f64, rate: LearningRate) -> f64 {
        let t = &mut self.arms[arm];
        let a = action.index();
        t.counts[state][a] += 1;
        let alpha = rate.alpha(t.counts[state][a]);
        let q = &mut t.q[state][a];
        *q = (1.0 - alpha) * *q + alpha * target;
        t.lambda[state] = t.q[state][1] - t.q[state][0];
        alpha
    }

    /// Test hook: overwrite one cell, keeping the index estimate in sync.
    pub fn set_q(&mut self, arm: usize, state: usize, action: Action, value: f64) {
        let t = &mut self.arms[arm];
        t.q[state][action.index()] = value;
        t.lambda[state] = t.q[state][1] - t.q[state][0];
    }
}
