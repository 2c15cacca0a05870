//! Activates the arms most likely to slip to a worse state if left alone.
//!
//! A state `z'` is worse than `z` when its passive reward is strictly lower.
//! Risk uses the true instance probabilities.

use super::select::{check_budget, top_m};
use super::wiql::check_observation;
use crate::error::Result;
use crate::mdp::{Action, ArmMdp, RmabInstance};
use crate::rng::Stream;

#[derive(Debug, Clone)]
pub struct Myopic {
    risk: Vec<Vec<f64>>,
    budget: usize,
}

/// `Σ_{z' worse than z} P(z, passive, z')` for every state.
pub fn drop_risk(mdp: &ArmMdp) -> Vec<f64> {
    let r = mdp.rewards(Action::Passive);
    (0..mdp.n_states())
        .map(|z| {
            (0..mdp.n_states())
                .filter(|&w| r[w] < r[z])
                .map(|w| mdp.prob(z, Action::Passive, w))
                .sum()
        })
        .collect()
}

impl Myopic {
    pub fn new(instance: &RmabInstance) -> Result<Self> {
        check_budget(instance.n_arms(), instance.budget)?;
        Ok(Self {
            risk: instance.arms.iter().map(drop_risk).collect(),
            budget: instance.budget,
        })
    }

    pub fn risk(&self, arm: usize, state: usize) -> f64 {
        self.risk[arm][state]
    }

    pub fn select(&self, observed: &[usize], t: u64, rng: &mut Stream) -> Result<Vec<usize>> {
        check_observation(observed, self.risk.len(), t)?;
        let scores: Vec<f64> = observed.iter().enumerate().map(|(i, &z)| self.risk[i][z]).collect();
        top_m(&scores, self.budget, rng)
    }

    pub fn arm_replaced(&mut self, arm: usize, mdp: &ArmMdp) {
        self.risk[arm] = drop_risk(mdp);
    }
}
