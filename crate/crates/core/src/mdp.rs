//! Two-action arm MDPs and budgeted RMAB instances.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row sums may deviate from one by at most this much before a row is rejected.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Rows closer to one than this are left untouched by renormalisation, so
/// loading a saved instance is bit-exact.
const RENORMALIZE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Passive = 0,
    Active = 1,
}

impl Action {
    pub const ALL: [Action; 2] = [Action::Passive, Action::Active];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_selected(selected: bool) -> Self {
        if selected {
            Action::Active
        } else {
            Action::Passive
        }
    }
}

/// One invariant failure reported by [`ArmMdp::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewStates { n_states: usize },
    Shape { what: String, expected: usize, found: usize },
    Probability { action: usize, row: usize, col: usize, value: f64 },
    RowSum { action: usize, row: usize, sum: f64 },
    NonFiniteReward { action: usize, state: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewStates { n_states } => {
                write!(f, "n_states ≥ 2 required, found {n_states}")
            }
            Violation::Shape { what, expected, found } => {
                write!(f, "{what} has length {found}, expected {expected}")
            }
            Violation::Probability { action, row, col, value } => write!(
                f,
                "action {action} entry ({row},{col}) = {value} is not a probability"
            ),
            Violation::RowSum { action, row, sum } => {
                write!(f, "action {action} row {row} sums to {sum}")
            }
            Violation::NonFiniteReward { action, state } => {
                write!(f, "reward for action {action} state {state} is not finite")
            }
        }
    }
}

/// A finite two-action MDP for a single arm.
///
/// `transitions[a][z][z']` is the probability of moving from `z` to `z'` under
/// action `a`, and `rewards[a][z]` the reward for taking `a` in `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmMdp {
    n_states: usize,
    transitions: [Vec<Vec<f64>>; 2],
    rewards: [Vec<f64>; 2],
}

impl ArmMdp {
    /// Validates, then renormalises every row once.
    pub fn new(transitions: [Vec<Vec<f64>>; 2], rewards: [Vec<f64>; 2]) -> Result<Self> {
        let mut mdp = Self::new_unchecked(transitions, rewards);
        let violations = mdp.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidMdp(violations));
        }
        mdp.renormalize();
        Ok(mdp)
    }

    /// Same reward for both actions in each state.
    pub fn with_state_rewards(transitions: [Vec<Vec<f64>>; 2], rewards: Vec<f64>) -> Result<Self> {
        Self::new(transitions, [rewards.clone(), rewards])
    }

    /// Builds without checking anything. Sampling from an unchecked MDP that
    /// fails [`validate`](Self::validate) gives meaningless draws.
    pub fn new_unchecked(transitions: [Vec<Vec<f64>>; 2], rewards: [Vec<f64>; 2]) -> Self {
        let n_states = transitions[0].len();
        Self {
            n_states,
            transitions,
            rewards,
        }
    }

    /// Returns every violated invariant; empty iff the MDP is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.n_states;
        let mut out = Vec::new();
        if n < 2 {
            out.push(Violation::TooFewStates { n_states: n });
        }
        for a in 0..2 {
            let matrix = &self.transitions[a];
            if matrix.len() != n {
                out.push(Violation::Shape {
                    what: format!("transitions[{a}]"),
                    expected: n,
                    found: matrix.len(),
                });
            }
            for (row, probs) in matrix.iter().enumerate() {
                if probs.len() != n {
                    out.push(Violation::Shape {
                        what: format!("transitions[{a}][{row}]"),
                        expected: n,
                        found: probs.len(),
                    });
                    continue;
                }
                for (col, &p) in probs.iter().enumerate() {
                    if !(0.0..=1.0).contains(&p) {
                        out.push(Violation::Probability { action: a, row, col, value: p });
                    }
                }
                let sum: f64 = probs.iter().sum();
                if !((sum - 1.0).abs() <= ROW_SUM_TOL) {
                    out.push(Violation::RowSum { action: a, row, sum });
                }
            }
            if self.rewards[a].len() != n {
                out.push(Violation::Shape {
                    what: format!("rewards[{a}]"),
                    expected: n,
                    found: self.rewards[a].len(),
                });
            }
            for (state, r) in self.rewards[a].iter().enumerate() {
                if !r.is_finite() {
                    out.push(Violation::NonFiniteReward { action: a, state });
                }
            }
        }
        out
    }

    fn renormalize(&mut self) {
        for matrix in &mut self.transitions {
            for row in matrix.iter_mut() {
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > RENORMALIZE_EPS {
                    row.iter_mut().for_each(|p| *p /= sum);
                }
            }
        }
    }

    #[inline]
    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn transitions(&self, action: Action) -> &[Vec<f64>] {
        &self.transitions[action.index()]
    }

    pub fn rewards(&self, action: Action) -> &[f64] {
        &self.rewards[action.index()]
    }

    #[inline]
    pub fn prob(&self, from: usize, action: Action, to: usize) -> f64 {
        self.transitions[action.index()][from][to]
    }

    pub fn reward(&self, state: usize, action: Action) -> Result<f64> {
        self.check_state(state)?;
        Ok(self.rewards[action.index()][state])
    }

    /// Largest absolute reward over all states and actions.
    pub fn max_abs_reward(&self) -> f64 {
        self.rewards
            .iter()
            .flatten()
            .fold(0.0_f64, |m, r| m.max(r.abs()))
    }

    /// Inverse-CDF draw of the next state, scanning the row in state order.
    pub fn sample_transition<R: Rng + ?Sized>(
        &self,
        state: usize,
        action: Action,
        rng: &mut R,
    ) -> Result<usize> {
        self.check_state(state)?;
        let row = &self.transitions[action.index()][state];
        let u: f64 = rng.random();
        let mut cum = 0.0;
        let mut last_positive = 0;
        for (next, &p) in row.iter().enumerate() {
            if p > 0.0 {
                cum += p;
                last_positive = next;
                if u < cum {
                    return Ok(next);
                }
            }
        }
        // u fell in the rounding gap above the final cumulative sum
        Ok(last_positive)
    }

    fn check_state(&self, state: usize) -> Result<()> {
        if state >= self.n_states {
            return Err(Error::OutOfRange {
                what: "state",
                index: state,
                limit: self.n_states,
            });
        }
        Ok(())
    }
}

/// Replaces `arm`'s MDP at the start of step `step`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledChange {
    pub step: u64,
    pub arm: usize,
    pub replacement: ArmMdp,
}

/// N arms, a per-step budget M and an optional schedule of arm replacements.
#[derive(Debug, Clone, PartialEq)]
pub struct RmabInstance {
    pub arms: Vec<ArmMdp>,
    pub budget: usize,
    pub initial_states: Vec<usize>,
    pub dynamics: Vec<ScheduledChange>,
}

impl RmabInstance {
    pub fn new(
        arms: Vec<ArmMdp>,
        budget: usize,
        initial_states: Vec<usize>,
        dynamics: Vec<ScheduledChange>,
    ) -> Result<Self> {
        let inst = Self {
            arms,
            budget,
            initial_states,
            dynamics,
        };
        inst.check()?;
        Ok(inst)
    }

    pub fn n_arms(&self) -> usize {
        self.arms.len()
    }

    /// Checks the instance-level invariants. Arm MDPs are valid by construction.
    pub fn check(&self) -> Result<()> {
        let n = self.arms.len();
        if self.budget < 1 || self.budget > n {
            return Err(Error::InvalidInstance(format!(
                "budget {} must satisfy 1 ≤ M ≤ N = {n}",
                self.budget
            )));
        }
        if self.initial_states.len() != n {
            return Err(Error::InvalidInstance(format!(
                "{} initial states for {n} arms",
                self.initial_states.len()
            )));
        }
        for (i, (&s, arm)) in self.initial_states.iter().zip(&self.arms).enumerate() {
            if s >= arm.n_states() {
                return Err(Error::InvalidInstance(format!(
                    "arm {i} initial state {s} ≥ n_states {}",
                    arm.n_states()
                )));
            }
        }
        let mut prev = 0;
        for (k, change) in self.dynamics.iter().enumerate() {
            if change.step == 0 {
                return Err(Error::InvalidInstance(format!("dynamics[{k}] step must be ≥ 1")));
            }
            if change.step < prev {
                return Err(Error::InvalidInstance(format!(
                    "dynamics[{k}] step {} is before step {prev}",
                    change.step
                )));
            }
            if change.arm >= n {
                return Err(Error::InvalidInstance(format!(
                    "dynamics[{k}] arm {} ≥ N = {n}",
                    change.arm
                )));
            }
            prev = change.step;
        }
        Ok(())
    }

    pub fn with_budget(mut self, budget: usize) -> Result<Self> {
        self.budget = budget;
        self.check()?;
        Ok(self)
    }
}
