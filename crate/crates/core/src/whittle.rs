//! Exact Whittle indices for a single arm.
//!
//! The subsidised single-arm problem pays `R(z, 0) + λ` for the passive action
//! and `R(z, 1)` for the active one. The Whittle index of `z` is the subsidy at
//! which both actions are equally good in `z`. It is located by bisection on
//! the sign of `q_active(z) - q_passive(z)`, with each evaluation solved by
//! value iteration (relative value iteration under the average-reward
//! criterion).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{Action, ArmMdp};

/// Self-loop weight of the aperiodicity transform used by relative value
/// iteration: `P' = τP + (1-τ)I`. Optimal policies and the sign of
/// `q_active - q_passive` are unchanged by it.
const APERIODICITY: f64 = 0.5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    AverageReward,
    Discounted(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    pub mode: Mode,
    /// Value iteration stops when the largest value change drops below this.
    pub tol: f64,
    pub max_iters: usize,
    /// Width of the final bisection bracket.
    pub eps: f64,
    /// Search bracket is `[-bound, bound]`. `None` starts from
    /// [`default_lambda_bound`] and doubles the bracket until it holds the index.
    pub lambda_bound: Option<f64>,
    /// Number of evenly spaced subsidies probed before bisection to detect a
    /// benefit curve that changes sign more than once.
    pub scan_points: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            mode: Mode::AverageReward,
            tol: 1e-9,
            max_iters: 100_000,
            eps: 1e-4,
            lambda_bound: None,
            scan_points: 16,
        }
    }
}

impl SolverParams {
    pub fn bound_for(&self, mdp: &ArmMdp) -> f64 {
        self.lambda_bound.unwrap_or_else(|| default_lambda_bound(mdp))
    }
}

/// `2·max|R| + 1`, the initial bracket half-width.
pub fn default_lambda_bound(mdp: &ArmMdp) -> f64 {
    2.0 * mdp.max_abs_reward() + 1.0
}

/// Solution of the λ-subsidised single-arm problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsidySolution {
    pub lambda: f64,
    pub q_passive: Vec<f64>,
    pub q_active: Vec<f64>,
    /// States where passive is optimal; ties count as passive.
    pub passive_set: Vec<usize>,
    /// Converged value function (relative values in average-reward mode).
    pub values: Vec<f64>,
    /// Optimal average reward; `None` in discounted mode.
    pub gain: Option<f64>,
    pub iterations: usize,
}

impl SubsidySolution {
    pub fn benefit(&self, state: usize) -> f64 {
        self.q_active[state] - self.q_passive[state]
    }

    pub fn is_passive(&self, state: usize) -> bool {
        self.q_passive[state] >= self.q_active[state]
    }
}

pub fn solve_subsidized(
    mdp: &ArmMdp,
    lambda: f64,
    mode: Mode,
    tol: f64,
    max_iters: usize,
) -> Result<SubsidySolution> {
    solve_subsidized_from(mdp, lambda, mode, tol, max_iters, &vec![0.0; mdp.n_states()])
}

/// As [`solve_subsidized`], starting value iteration from `init`.
pub fn solve_subsidized_from(
    mdp: &ArmMdp,
    lambda: f64,
    mode: Mode,
    tol: f64,
    max_iters: usize,
    init: &[f64],
) -> Result<SubsidySolution> {
    let n = mdp.n_states();
    if init.len() != n {
        return Err(Error::Contract(format!(
            "initial value vector has length {}, expected {n}",
            init.len()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Contract(format!("tol must be positive, got {tol}")));
    }
    let discount = match mode {
        Mode::Discounted(g) if g > 0.0 && g < 1.0 => Some(g),
        Mode::Discounted(g) => {
            return Err(Error::Contract(format!("discount must lie in (0,1), got {g}")))
        }
        Mode::AverageReward => None,
    };

    let subsidy = |a: Action| if a == Action::Passive { lambda } else { 0.0 };
    // one-step lookahead r(z,a) + sub(a) + Σ P(z,a,z') v(z')
    let lookahead = |v: &[f64], z: usize, a: Action, scale: f64| -> f64 {
        let row = &mdp.transitions(a)[z];
        let ev: f64 = row.iter().zip(v).map(|(p, x)| p * x).sum();
        mdp.rewards(a)[z] + subsidy(a) + scale * ev
    };

    let mut v = init.to_vec();
    if discount.is_none() {
        let base = v[0];
        v.iter_mut().for_each(|x| *x -= base);
    }
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut offset = 0.0;
    let mut iterations = 0;

    while iterations < max_iters {
        iterations += 1;
        match discount {
            Some(g) => {
                for z in 0..n {
                    next[z] = Action::ALL
                        .iter()
                        .map(|&a| lookahead(&v, z, a, g))
                        .fold(f64::NEG_INFINITY, f64::max);
                }
            }
            None => {
                for z in 0..n {
                    let best = Action::ALL
                        .iter()
                        .map(|&a| lookahead(&v, z, a, 1.0))
                        .fold(f64::NEG_INFINITY, f64::max);
                    next[z] = APERIODICITY * best + (1.0 - APERIODICITY) * v[z];
                }
                offset = next[0];
                next.iter_mut().for_each(|x| *x -= offset);
            }
        }
        residual = next
            .iter()
            .zip(&v)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        std::mem::swap(&mut v, &mut next);
        if residual < tol {
            break;
        }
    }
    if !(residual < tol) {
        return Err(Error::NotConverged {
            iters: iterations,
            residual,
        });
    }

    let (scale, gain) = match discount {
        Some(g) => (g, None),
        None => (1.0, Some(offset / APERIODICITY)),
    };
    let shift = gain.unwrap_or(0.0);
    let q_passive: Vec<f64> = (0..n)
        .map(|z| lookahead(&v, z, Action::Passive, scale) - shift)
        .collect();
    let q_active: Vec<f64> = (0..n)
        .map(|z| lookahead(&v, z, Action::Active, scale) - shift)
        .collect();
    let passive_set = (0..n).filter(|&z| q_passive[z] >= q_active[z]).collect();

    Ok(SubsidySolution {
        lambda,
        q_passive,
        q_active,
        passive_set,
        values: v,
        gain,
        iterations,
    })
}

/// Whittle index of `state`.
///
/// The arm must be indexable at `state`: the benefit of the active action has
/// to change sign exactly once inside the search bracket.
pub fn whittle_index(mdp: &ArmMdp, state: usize, params: &SolverParams) -> Result<f64> {
    whittle_index_from(mdp, state, params, &vec![0.0; mdp.n_states()])
}

/// As [`whittle_index`], with every value iteration started from `init`.
pub fn whittle_index_from(
    mdp: &ArmMdp,
    state: usize,
    params: &SolverParams,
    init: &[f64],
) -> Result<f64> {
    if state >= mdp.n_states() {
        return Err(Error::OutOfRange {
            what: "state",
            index: state,
            limit: mdp.n_states(),
        });
    }
    if !(params.eps > 0.0) {
        return Err(Error::Contract(format!("eps must be positive, got {}", params.eps)));
    }
    let active_better = |lambda: f64| -> Result<bool> {
        let sol = solve_subsidized_from(mdp, lambda, params.mode, params.tol, params.max_iters, init)?;
        Ok(!sol.is_passive(state))
    };

    // Scan first: the active action must be preferred on a prefix of the
    // bracket and the passive one on the remaining suffix. Without an explicit
    // bound the bracket doubles until it contains the switch.
    let widen = params.lambda_bound.is_none();
    let mut bound = params.bound_for(mdp);
    let (mut lo, mut hi) = loop {
        let (lo, hi) = scan(bound, params.scan_points, state, &active_better)?;
        if lo >= -bound && hi < f64::INFINITY {
            break (lo, hi);
        }
        if !widen || bound >= MAX_AUTO_BOUND {
            return Err(Error::IndexOutsideBound { state, bound });
        }
        bound *= 2.0;
    };

    while hi - lo >= params.eps {
        let mid = 0.5 * (lo + hi);
        if active_better(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest bracket reached by automatic widening.
const MAX_AUTO_BOUND: f64 = 1e9;

/// Evenly spaced probes on `[-bound, bound]`. Returns the last active-preferred
/// probe and the first passive-preferred one (`-bound - 1` and infinity when
/// absent); a passive probe followed by an active one is a non-indexable state.
fn scan(
    bound: f64,
    points: usize,
    state: usize,
    active_better: &impl Fn(f64) -> Result<bool>,
) -> Result<(f64, f64)> {
    let points = points.max(2);
    let mut lo = -bound - 1.0;
    let mut hi = f64::INFINITY;
    for k in 0..points {
        let lambda = -bound + 2.0 * bound * k as f64 / (points - 1) as f64;
        if active_better(lambda)? {
            if hi < f64::INFINITY {
                return Err(Error::NonIndexable { state });
            }
            lo = lambda;
        } else if hi == f64::INFINITY {
            hi = lambda;
        }
    }
    Ok((lo, hi))
}

/// Whittle index of every state of one arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexTable(pub Vec<f64>);

impl IndexTable {
    #[inline]
    pub fn get(&self, state: usize) -> f64 {
        self.0[state]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn index_table(mdp: &ArmMdp, params: &SolverParams) -> Result<IndexTable> {
    (0..mdp.n_states())
        .map(|z| {
            whittle_index(mdp, z, params).map_err(|e| Error::IndexTable {
                state: z,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(IndexTable)
}

/// Index tables for every arm, reusing tables of identical arms.
pub fn index_tables(arms: &[ArmMdp], params: &SolverParams) -> Result<Vec<IndexTable>> {
    let mut solved: Vec<(&ArmMdp, IndexTable)> = Vec::new();
    let mut out = Vec::with_capacity(arms.len());
    for (i, arm) in arms.iter().enumerate() {
        let table = match solved.iter().find(|(a, _)| *a == arm) {
            Some((_, t)) => t.clone(),
            None => {
                let t = index_table(arm, params).map_err(|e| Error::Arm {
                    arm: i,
                    source: Box::new(e),
                })?;
                solved.push((arm, t.clone()));
                t
            }
        };
        out.push(table);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Indexability {
    Indexable,
    /// `state` is passive at `lambda_lo` but active again at `lambda_hi`.
    Exit {
        lambda_lo: f64,
        lambda_hi: f64,
        state: usize,
    },
    /// The passive set is not empty at the bottom of the grid (or not full at
    /// the top); `state` is the first offending state.
    Boundary { lambda: f64, state: usize },
}

impl Indexability {
    pub fn is_indexable(&self) -> bool {
        matches!(self, Indexability::Indexable)
    }
}

/// Evenly spaced grid on `[-bound, bound]`, endpoints included.
pub fn lambda_grid(bound: f64, step: f64) -> Vec<f64> {
    let n = (2.0 * bound / step).round() as usize;
    (0..=n).map(|k| -bound + k as f64 * step).collect()
}

/// Checks that the passive set grows monotonically from ∅ to all states
/// along `grid` (sorted ascending).
pub fn check_indexability(
    mdp: &ArmMdp,
    grid: &[f64],
    mode: Mode,
    tol: f64,
    max_iters: usize,
) -> Result<Indexability> {
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Contract("lambda grid must be sorted ascending".into()));
    }
    let n = mdp.n_states();
    let mut prev: Option<(f64, Vec<bool>)> = None;
    for (k, &lambda) in grid.iter().enumerate() {
        let sol = solve_subsidized(mdp, lambda, mode, tol, max_iters)?;
        let passive: Vec<bool> = (0..n).map(|z| sol.is_passive(z)).collect();
        if k == 0 {
            if let Some(z) = passive.iter().position(|&p| p) {
                return Ok(Indexability::Boundary { lambda, state: z });
            }
        }
        if let Some((lambda_lo, before)) = &prev {
            if let Some(z) = (0..n).find(|&z| before[z] && !passive[z]) {
                return Ok(Indexability::Exit {
                    lambda_lo: *lambda_lo,
                    lambda_hi: lambda,
                    state: z,
                });
            }
        }
        prev = Some((lambda, passive));
    }
    if let Some((lambda, last)) = prev {
        if let Some(z) = last.iter().position(|&p| !p) {
            return Ok(Indexability::Boundary { lambda, state: z });
        }
    }
    Ok(Indexability::Indexable)
}
