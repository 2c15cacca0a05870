//! Seeded RMAB episodes, parallel trials and aggregation.
//!
//! Each step `t = 1..=T`:
//!
//! 1. scheduled arm replacements due at `t` take effect,
//! 2. the policy selects `M` arms,
//! 3. every arm acts (selected ⇒ active), earns `R(z, a)` and transitions,
//! 4. the policy is updated once per arm.
//!
//! Episode `seed` drives the policy through stream [`rng::POLICY`] and arm
//! `i`'s transitions through stream `rng::ARM_BASE + i`; trial `k` of a batch
//! uses seed `base_seed + k`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mdp::{Action, ArmMdp, RmabInstance};
use crate::policy::Policy;
use crate::rng;

/// Environment variable capping the worker threads used by [`run_trials`].
pub const THREADS_ENV: &str = "RMAB_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub struct TrialLog {
    pub seed: u64,
    /// `Σ_i R_i` at each step.
    pub per_step_total_reward: Vec<f64>,
    /// Active arms at each step, ascending.
    pub actions: Vec<Vec<usize>>,
}

impl TrialLog {
    pub fn horizon(&self) -> usize {
        self.per_step_total_reward.len()
    }

    /// Mean per-step reward over the final `fraction` of the episode.
    pub fn tail_mean(&self, fraction: f64) -> f64 {
        tail_mean(&self.per_step_total_reward, fraction)
    }
}

/// Mean of the last `ceil(fraction·len)` entries (at least one).
pub fn tail_mean(series: &[f64], fraction: f64) -> f64 {
    let k = ((series.len() as f64 * fraction).ceil() as usize).clamp(1, series.len());
    series[series.len() - k..].iter().sum::<f64>() / k as f64
}

fn check_selection(selected: &[usize], n: usize, m: usize, t: u64) -> Result<()> {
    let ok = selected.len() == m
        && selected.windows(2).all(|w| w[0] < w[1])
        && selected.last().is_none_or(|&a| a < n);
    if !ok {
        return Err(Error::Contract(format!(
            "step {t}: selection {selected:?} is not {m} distinct ascending arms out of {n}"
        )));
    }
    Ok(())
}

pub fn run_episode<P: Policy + ?Sized>(
    instance: &RmabInstance,
    policy: &mut P,
    horizon: u64,
    seed: u64,
) -> Result<TrialLog> {
    if horizon < 1 {
        return Err(Error::Contract("horizon must be at least 1".into()));
    }
    instance.check()?;
    let n = instance.n_arms();
    let m = instance.budget;
    let mut arms: Vec<&ArmMdp> = instance.arms.iter().collect();
    let mut states = instance.initial_states.clone();
    let mut policy_rng = rng::split(seed, rng::POLICY);
    let mut arm_rngs: Vec<rng::Stream> = (0..n).map(|i| rng::arm_stream(seed, i)).collect();
    let mut pending = instance.dynamics.iter().peekable();

    let mut rewards = Vec::with_capacity(horizon as usize);
    let mut actions = Vec::with_capacity(horizon as usize);
    let mut active = vec![false; n];

    for t in 1..=horizon {
        while let Some(change) = pending.next_if(|c| c.step <= t) {
            arms[change.arm] = &change.replacement;
            policy.arm_replaced(change.arm, &change.replacement)?;
        }

        let selected = policy.select(&states, t, &mut policy_rng)?;
        check_selection(&selected, n, m, t)?;
        active.iter_mut().for_each(|a| *a = false);
        for &i in &selected {
            active[i] = true;
        }

        let mut total = 0.0;
        for i in 0..n {
            let action = Action::from_selected(active[i]);
            let z = states[i];
            let r = arms[i].reward(z, action)?;
            let next = arms[i].sample_transition(z, action, &mut arm_rngs[i])?;
            policy.update(i, z, action, r, next);
            total += r;
            states[i] = next;
        }
        rewards.push(total);
        actions.push(selected);
    }

    Ok(TrialLog {
        seed,
        per_step_total_reward: rewards,
        actions,
    })
}

fn env_threads() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs `n_trials` independent episodes; trial `k` uses seed `base_seed + k`
/// and a fresh policy from `factory(k)`. Worker count honours `RMAB_THREADS`.
pub fn run_trials<P, F>(
    instance: &RmabInstance,
    factory: F,
    horizon: u64,
    n_trials: usize,
    base_seed: u64,
) -> Result<Vec<TrialLog>>
where
    P: Policy + Send,
    F: Fn(usize) -> Result<P> + Sync,
{
    run_trials_with_threads(instance, factory, horizon, n_trials, base_seed, env_threads())
}

/// As [`run_trials`] with an explicit worker count (`Some(1)` is sequential).
pub fn run_trials_with_threads<P, F>(
    instance: &RmabInstance,
    factory: F,
    horizon: u64,
    n_trials: usize,
    base_seed: u64,
    threads: Option<usize>,
) -> Result<Vec<TrialLog>>
where
    P: Policy + Send,
    F: Fn(usize) -> Result<P> + Sync,
{
    if n_trials < 1 {
        return Err(Error::Contract("n_trials must be at least 1".into()));
    }
    let one = |k: usize| -> Result<TrialLog> {
        let wrap = |e: Error| Error::Trial {
            trial: k,
            source: Box::new(e),
        };
        let mut policy = factory(k).map_err(wrap)?;
        run_episode(instance, &mut policy, horizon, base_seed + k as u64).map_err(wrap)
    };
    match threads {
        Some(1) => (0..n_trials).map(one).collect(),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Contract(format!("thread pool: {e}")))?;
            pool.install(|| (0..n_trials).into_par_iter().map(one).collect())
        }
        None => (0..n_trials).into_par_iter().map(one).collect(),
    }
}

/// Per-step statistics over trials.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSeries {
    pub n_trials: usize,
    pub window: usize,
    pub mean: Vec<f64>,
    /// Sample standard deviation over `√n_trials`; zero for a single trial.
    pub stderr: Vec<f64>,
    /// Trailing moving average of `mean`; the first `window - 1` points
    /// average the available prefix.
    pub moving_avg: Vec<f64>,
}

pub fn aggregate(logs: &[TrialLog], window: usize) -> Result<AggregateSeries> {
    let first = logs
        .first()
        .ok_or_else(|| Error::Contract("cannot aggregate zero trials".into()))?;
    if window < 1 {
        return Err(Error::Contract("moving-average window must be at least 1".into()));
    }
    let len = first.horizon();
    if logs.iter().any(|l| l.horizon() != len) {
        return Err(Error::Contract("trial logs have different lengths".into()));
    }
    let n = logs.len() as f64;
    let mut mean = Vec::with_capacity(len);
    let mut stderr = Vec::with_capacity(len);
    for t in 0..len {
        let mu = logs.iter().map(|l| l.per_step_total_reward[t]).sum::<f64>() / n;
        let se = if logs.len() > 1 {
            let var = logs
                .iter()
                .map(|l| (l.per_step_total_reward[t] - mu).powi(2))
                .sum::<f64>()
                / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        mean.push(mu);
        stderr.push(se);
    }
    let moving_avg = moving_average(&mean, window);
    Ok(AggregateSeries {
        n_trials: logs.len(),
        window,
        mean,
        stderr,
        moving_avg,
    })
}

pub fn moving_average(series: &[f64], window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0;
    for (t, x) in series.iter().enumerate() {
        sum += x;
        if t >= window {
            sum -= series[t - window];
        }
        out.push(sum / (t + 1).min(window) as f64);
    }
    out
}

#[derive(Serialize)]
struct RawRow<'a> {
    instance: &'a str,
    policy: &'a str,
    trial: usize,
    t: usize,
    total_reward: f64,
}

#[derive(Serialize)]
struct AggRow<'a> {
    instance: &'a str,
    policy: &'a str,
    t: usize,
    mean: f64,
    stderr: f64,
    moving_avg: f64,
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// `instance,policy,trial,t,total_reward`, with `t` counted from 1.
pub fn write_raw_csv<W: Write>(out: W, instance: &str, policy: &str, logs: &[TrialLog]) -> Result<()> {
    let mut w = csv_writer(out);
    for (trial, log) in logs.iter().enumerate() {
        for (t, &total_reward) in log.per_step_total_reward.iter().enumerate() {
            w.serialize(RawRow {
                instance,
                policy,
                trial,
                t: t + 1,
                total_reward,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `instance,policy,t,mean,stderr,moving_avg`.
pub fn write_agg_csv<W: Write>(out: W, instance: &str, policy: &str, series: &AggregateSeries) -> Result<()> {
    let mut w = csv_writer(out);
    for t in 0..series.mean.len() {
        w.serialize(AggRow {
            instance,
            policy,
            t: t + 1,
            mean: series.mean[t],
            stderr: series.stderr[t],
            moving_avg: series.moving_avg[t],
        })?;
    }
    w.flush()?;
    Ok(())
}
