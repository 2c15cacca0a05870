//! Benchmark instance generators and the JSON instance file format.
//!
//! ```json
//! {"budget": 1,
//!  "arms": [{"n_states": 2, "transitions": [[[..],[..]], [[..],[..]]],
//!            "rewards": [[..], [..]], "initial_state": 0}],
//!  "dynamics": [{"step": 28, "arm": 0, "replacement": {"n_states": 2, ...}}]}
//! ```
//!
//! `transitions[a]` and `rewards[a]` are indexed by action (0 passive,
//! 1 active). `initial_state` is optional inside `replacement`.

use std::path::Path;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{Action, ArmMdp, RmabInstance, ScheduledChange};
use crate::rng;

fn build(transitions: [Vec<Vec<f64>>; 2], rewards: [Vec<f64>; 2]) -> ArmMdp {
    ArmMdp::new(transitions, rewards).expect("generator produced an invalid arm")
}

fn uniform_initial_states(n: usize, n_states: usize, seed: u64) -> Vec<usize> {
    let mut r = rng::split(seed, rng::INSTANCE);
    (0..n).map(|_| r.random_range(0..n_states)).collect()
}

fn identical(arm: ArmMdp, n: usize, budget: usize, initial_states: Vec<usize>) -> Result<RmabInstance> {
    RmabInstance::new(vec![arm; n], budget, initial_states, Vec::new())
}

// ---------------------------------------------------------------------------
// Circulant dynamics

pub fn circulant_arm() -> ArmMdp {
    let active = vec![
        vec![0.5, 0.5, 0.0, 0.0],
        vec![0.0, 0.5, 0.5, 0.0],
        vec![0.0, 0.0, 0.5, 0.5],
        vec![0.5, 0.0, 0.0, 0.5],
    ];
    let passive = vec![
        vec![0.5, 0.0, 0.0, 0.5],
        vec![0.5, 0.5, 0.0, 0.0],
        vec![0.0, 0.5, 0.5, 0.0],
        vec![0.0, 0.0, 0.5, 0.5],
    ];
    let r = vec![-1.0, 0.0, 0.0, 1.0];
    build([passive, active], [r.clone(), r])
}

/// `n` identical four-state circulant arms with uniform random initial states.
pub fn circulant(n: usize, budget: usize, seed: u64) -> RmabInstance {
    identical(circulant_arm(), n, budget, uniform_initial_states(n, 4, seed))
        .expect("circulant: budget must satisfy 1 ≤ M ≤ N")
}

// ---------------------------------------------------------------------------
// Restart

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RestartParams {
    pub p_active: f64,
    pub q_active: f64,
    pub p_passive: f64,
    pub q_passive: f64,
    /// Base of the state reward `base^z`.
    pub reward_base: f64,
    /// Reward for the active action; `None` uses the passive reward `base^z`.
    pub active_reward: Option<f64>,
}

impl Default for RestartParams {
    fn default() -> Self {
        Self {
            p_active: 1.0,
            q_active: 0.0,
            p_passive: 0.1,
            q_passive: 0.9,
            reward_base: 0.9,
            active_reward: None,
        }
    }
}

fn restart_matrix(p: f64, q: f64) -> Vec<Vec<f64>> {
    (0..5)
        .map(|z| {
            let mut row = vec![0.0; 5];
            row[0] += p;
            row[(z + 1).min(4)] += q;
            row
        })
        .collect()
}

/// Five states; the active action sends the arm back to state 0.
pub fn restart_arm(params: &RestartParams) -> ArmMdp {
    let passive_r: Vec<f64> = (0..5).map(|z| params.reward_base.powi(z)).collect();
    let active_r = match params.active_reward {
        Some(r) => vec![r; 5],
        None => passive_r.clone(),
    };
    build(
        [
            restart_matrix(params.p_passive, params.q_passive),
            restart_matrix(params.p_active, params.q_active),
        ],
        [passive_r, active_r],
    )
}

pub fn restart(n: usize, budget: usize, seed: u64, params: &RestartParams) -> RmabInstance {
    identical(restart_arm(params), n, budget, uniform_initial_states(n, 5, seed))
        .expect("restart: budget must satisfy 1 ≤ M ≤ N")
}

// ---------------------------------------------------------------------------
// Mentoring instructions

/// Band-matrix parameters: under action `a` a student moves up with
/// probability `p_a` and down with `q_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MentoringParams {
    pub p1: f64,
    pub q1: f64,
    pub p0: f64,
    pub q0: f64,
}

impl Default for MentoringParams {
    /// The literal published values; both actions coincide.
    fn default() -> Self {
        Self {
            p1: 0.7,
            q1: 0.3,
            p0: 0.7,
            q0: 0.3,
        }
    }
}

impl MentoringParams {
    /// Upward drift under the active action, mirrored downward drift when passive.
    pub fn separated() -> Self {
        Self {
            p1: 0.7,
            q1: 0.3,
            p0: 0.3,
            q0: 0.7,
        }
    }
}

const MENTORING_STATES: usize = 10;

fn band_matrix(up: f64, down: f64) -> Vec<Vec<f64>> {
    let n = MENTORING_STATES;
    (0..n)
        .map(|z| {
            let mut row = vec![0.0; n];
            row[z.saturating_sub(1)] += down;
            row[(z + 1).min(n - 1)] += up;
            row
        })
        .collect()
}

pub fn mentoring_arm(params: &MentoringParams) -> ArmMdp {
    let r: Vec<f64> = (0..MENTORING_STATES)
        .map(|z| (z as f64 / 10.0).sqrt())
        .collect();
    build(
        [band_matrix(params.p0, params.q0), band_matrix(params.p1, params.q1)],
        [r.clone(), r],
    )
}

pub fn mentoring(n: usize, budget: usize, seed: u64, params: &MentoringParams) -> RmabInstance {
    identical(
        mentoring_arm(params),
        n,
        budget,
        uniform_initial_states(n, MENTORING_STATES, seed),
    )
    .expect("mentoring: budget must satisfy 1 ≤ M ≤ N")
}

// ---------------------------------------------------------------------------
// Maternal engagement (S / P / L)

pub const SELF_MOTIVATED: usize = 0;
pub const PERSUADABLE: usize = 1;
pub const LOST_CAUSE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaternalCategory {
    pub label: char,
    /// P → S under the active action.
    pub p_ps: f64,
    /// P → L under the passive action.
    pub p_pl: f64,
}

impl MaternalCategory {
    pub const A: Self = Self { label: 'A', p_ps: 0.8, p_pl: 0.8 };
    pub const B: Self = Self { label: 'B', p_ps: 0.4, p_pl: 0.6 };
    pub const C: Self = Self { label: 'C', p_ps: 0.1, p_pl: 0.6 };
}

/// The transition entries the engagement model leaves open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaternalShape {
    /// S → S under either action; the rest moves to P.
    pub s_retention: f64,
    /// L → P under either action; the rest stays in L.
    pub l_to_p: f64,
    /// Share of the active-action P-row mass not going to S that stays in P;
    /// the remainder drops to L.
    pub active_p_stay_share: f64,
    pub rewards: [f64; 3],
}

impl Default for MaternalShape {
    fn default() -> Self {
        Self {
            s_retention: 0.9,
            l_to_p: 0.1,
            active_p_stay_share: 0.5,
            rewards: [2.0, 1.0, 0.0],
        }
    }
}

pub fn maternal_arm(category: &MaternalCategory, shape: &MaternalShape) -> ArmMdp {
    let s_row = vec![shape.s_retention, 1.0 - shape.s_retention, 0.0];
    let l_row = vec![0.0, shape.l_to_p, 1.0 - shape.l_to_p];
    let rest = 1.0 - category.p_ps;
    let active_p = vec![
        category.p_ps,
        rest * shape.active_p_stay_share,
        rest * (1.0 - shape.active_p_stay_share),
    ];
    let passive_p = vec![0.0, 1.0 - category.p_pl, category.p_pl];
    let r = shape.rewards.to_vec();
    build(
        [
            vec![s_row.clone(), passive_p, l_row.clone()],
            vec![s_row, active_p, l_row],
        ],
        [r.clone(), r],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaternalCounts {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Default for MaternalCounts {
    fn default() -> Self {
        Self { a: 10, b: 10, c: 30 }
    }
}

impl MaternalCounts {
    pub fn total(&self) -> usize {
        self.a + self.b + self.c
    }

    /// Category of every arm: A arms first, then B, then C.
    pub fn categories(&self) -> Vec<MaternalCategory> {
        std::iter::repeat_n(MaternalCategory::A, self.a)
            .chain(std::iter::repeat_n(MaternalCategory::B, self.b))
            .chain(std::iter::repeat_n(MaternalCategory::C, self.c))
            .collect()
    }
}

/// Static engagement instance; every arm starts in P.
pub fn maternal_static(counts: &MaternalCounts, budget: usize, shape: &MaternalShape) -> Result<RmabInstance> {
    let arms: Vec<ArmMdp> = counts
        .categories()
        .iter()
        .map(|c| maternal_arm(c, shape))
        .collect();
    let n = arms.len();
    RmabInstance::new(arms, budget, vec![PERSUADABLE; n], Vec::new())
}

/// The static instance plus a behaviour change at `change_week`: A arms
/// become B, B arms become C, and `counts.a` arms drawn from category C
/// become A.
pub fn maternal_dynamic(
    counts: &MaternalCounts,
    budget: usize,
    change_week: u64,
    seed: u64,
    shape: &MaternalShape,
) -> Result<RmabInstance> {
    if counts.a > counts.c {
        return Err(Error::Config(format!(
            "cannot promote {} category-C arms, only {} exist",
            counts.a, counts.c
        )));
    }
    let mut inst = maternal_static(counts, budget, shape)?;
    let b_arm = maternal_arm(&MaternalCategory::B, shape);
    let c_arm = maternal_arm(&MaternalCategory::C, shape);
    let a_arm = maternal_arm(&MaternalCategory::A, shape);

    let mut dynamics = Vec::new();
    for arm in 0..counts.a {
        dynamics.push(ScheduledChange { step: change_week, arm, replacement: b_arm.clone() });
    }
    for arm in counts.a..counts.a + counts.b {
        dynamics.push(ScheduledChange { step: change_week, arm, replacement: c_arm.clone() });
    }
    let c_start = counts.a + counts.b;
    let mut r = rng::split(seed, rng::INSTANCE);
    let mut promoted = sample(&mut r, counts.c, counts.a).into_vec();
    promoted.sort_unstable();
    for k in promoted {
        dynamics.push(ScheduledChange {
            step: change_week,
            arm: c_start + k,
            replacement: a_arm.clone(),
        });
    }
    inst.dynamics = dynamics;
    inst.check()?;
    Ok(inst)
}

// ---------------------------------------------------------------------------
// Presets used by tests and the `index` command

/// Three states, both actions identical; every Whittle index is zero.
pub fn action_symmetric_arm() -> ArmMdp {
    let p = vec![
        vec![0.6, 0.3, 0.1],
        vec![0.2, 0.5, 0.3],
        vec![0.1, 0.3, 0.6],
    ];
    let r = vec![1.0, 0.5, 0.0];
    build([p.clone(), p], [r.clone(), r])
}

/// A three-state arm whose passive set is not monotone in the subsidy
/// (found by random search; state 0 leaves the passive set again).
pub fn non_indexable_arm() -> ArmMdp {
    build(NON_INDEXABLE_TRANSITIONS.map(|m| m.iter().map(|r| r.to_vec()).collect()), [
        NON_INDEXABLE_REWARDS[0].to_vec(),
        NON_INDEXABLE_REWARDS[1].to_vec(),
    ])
}

const NON_INDEXABLE_TRANSITIONS: [[[f64; 3]; 3]; 2] = [
    [[0.03, 0.0, 0.97], [0.02, 0.94, 0.04], [0.98, 0.01, 0.01]],
    [[0.65, 0.09, 0.26], [0.09, 0.03, 0.88], [0.0, 0.05, 0.95]],
];
const NON_INDEXABLE_REWARDS: [[f64; 3]; 2] = [[0.25, 0.37, -0.58], [0.19, 0.09, 0.32]];

// ---------------------------------------------------------------------------
// File format

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmFile {
    pub n_states: usize,
    pub transitions: [Vec<Vec<f64>>; 2],
    pub rewards: [Vec<f64>; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeFile {
    pub step: u64,
    pub arm: usize,
    pub replacement: ArmFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub budget: usize,
    pub arms: Vec<ArmFile>,
    #[serde(default)]
    pub dynamics: Vec<ChangeFile>,
}

impl ArmFile {
    fn from_arm(arm: &ArmMdp, initial_state: Option<usize>) -> Self {
        Self {
            n_states: arm.n_states(),
            transitions: Action::ALL.map(|a| arm.transitions(a).to_vec()),
            rewards: Action::ALL.map(|a| arm.rewards(a).to_vec()),
            initial_state,
        }
    }

    fn to_arm(&self, path: &str) -> std::result::Result<ArmMdp, String> {
        let arm = ArmMdp::new_unchecked(self.transitions.clone(), self.rewards.clone());
        let mut violations: Vec<String> = arm.validate().iter().map(|v| format!("{path}: {v}")).collect();
        if self.n_states != arm.n_states() {
            violations.push(format!(
                "{path}: n_states is {} but transitions have {} rows",
                self.n_states,
                arm.n_states()
            ));
        }
        if !violations.is_empty() {
            return Err(violations.join("; "));
        }
        ArmMdp::new(self.transitions.clone(), self.rewards.clone()).map_err(|e| format!("{path}: {e}"))
    }
}

impl InstanceFile {
    pub fn from_instance(inst: &RmabInstance) -> Self {
        Self {
            budget: inst.budget,
            arms: inst
                .arms
                .iter()
                .zip(&inst.initial_states)
                .map(|(a, &s)| ArmFile::from_arm(a, Some(s)))
                .collect(),
            dynamics: inst
                .dynamics
                .iter()
                .map(|c| ChangeFile {
                    step: c.step,
                    arm: c.arm,
                    replacement: ArmFile::from_arm(&c.replacement, None),
                })
                .collect(),
        }
    }

    /// Validates everything; the error message names the offending path.
    pub fn into_instance(self) -> std::result::Result<RmabInstance, String> {
        let mut arms = Vec::with_capacity(self.arms.len());
        let mut initial = Vec::with_capacity(self.arms.len());
        for (i, a) in self.arms.iter().enumerate() {
            arms.push(a.to_arm(&format!("arms[{i}]"))?);
            initial.push(a.initial_state.unwrap_or(0));
        }
        let mut dynamics = Vec::with_capacity(self.dynamics.len());
        for (k, c) in self.dynamics.iter().enumerate() {
            dynamics.push(ScheduledChange {
                step: c.step,
                arm: c.arm,
                replacement: c.replacement.to_arm(&format!("dynamics[{k}].replacement"))?,
            });
        }
        RmabInstance::new(arms, self.budget, initial, dynamics).map_err(|e| e.to_string())
    }
}

pub fn to_json(inst: &RmabInstance) -> Result<String> {
    Ok(serde_json::to_string_pretty(&InstanceFile::from_instance(inst))?)
}

pub fn from_json(text: &str) -> std::result::Result<RmabInstance, String> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    file.into_instance()
}

pub fn save(inst: &RmabInstance, path: impl AsRef<Path>) -> Result<()> {
    let mut text = to_json(inst)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<RmabInstance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    from_json(&text).map_err(|message| Error::Load {
        path: path.to_path_buf(),
        message,
    })
}
