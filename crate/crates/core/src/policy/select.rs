//! Budgeted selection helpers shared by every policy.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

pub(crate) fn check_budget(n: usize, m: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::Contract(format!("budget M = {m} must satisfy 1 ≤ M ≤ N = {n}")));
    }
    Ok(())
}

/// The `m` arms with the largest scores, ties broken uniformly at random.
/// Returned in ascending arm order.
pub fn top_m<R: Rng + ?Sized>(scores: &[f64], m: usize, rng: &mut R) -> Result<Vec<usize>> {
    check_budget(scores.len(), m)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.shuffle(rng);
    // stable sort keeps the shuffled order inside each tie class
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut chosen = order[..m].to_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

/// A uniformly random `m`-subset of `0..n`, in ascending order.
pub fn random_subset<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Vec<usize>> {
    check_budget(n, m)?;
    let mut chosen = sample(rng, n, m).into_vec();
    chosen.sort_unstable();
    Ok(chosen)
}
