//! Chooses the arms with the largest gap between the observed mean rewards of
//! the active and the passive action in their current state.

use super::select::{check_budget, top_m};
use super::wiql::check_observation;
use crate::error::Result;
use crate::mdp::Action;
use crate::rng::Stream;

#[derive(Debug, Clone)]
pub struct Greedy {
    sums: Vec<Vec<[f64; 2]>>,
    counts: Vec<Vec<[u64; 2]>>,
    budget: usize,
}

impl Greedy {
    pub fn new(states_per_arm: impl IntoIterator<Item = usize>, budget: usize) -> Result<Self> {
        let sizes: Vec<usize> = states_per_arm.into_iter().collect();
        check_budget(sizes.len(), budget)?;
        Ok(Self {
            sums: sizes.iter().map(|&n| vec![[0.0; 2]; n]).collect(),
            counts: sizes.iter().map(|&n| vec![[0; 2]; n]).collect(),
            budget,
        })
    }

    /// Running mean reward of a cell; unvisited cells read 0.
    pub fn mean(&self, arm: usize, state: usize, action: Action) -> f64 {
        let a = action.index();
        match self.counts[arm][state][a] {
            0 => 0.0,
            c => self.sums[arm][state][a] / c as f64,
        }
    }

    pub fn gap(&self, arm: usize, state: usize) -> f64 {
        self.mean(arm, state, Action::Active) - self.mean(arm, state, Action::Passive)
    }

    pub fn select(&self, observed: &[usize], t: u64, rng: &mut Stream) -> Result<Vec<usize>> {
        check_observation(observed, self.sums.len(), t)?;
        let scores: Vec<f64> = observed.iter().enumerate().map(|(i, &z)| self.gap(i, z)).collect();
        top_m(&scores, self.budget, rng)
    }

    pub fn update(&mut self, arm: usize, state: usize, action: Action, reward: f64) {
        self.sums[arm][state][action.index()] += reward;
        self.counts[arm][state][action.index()] += 1;
    }
}
