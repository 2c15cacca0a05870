#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rmab::{Action, ArmMdp};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Stationary distribution of an irreducible chain: πᵀ(P - I) = 0, Σπ = 1.
pub fn stationary(p: &DMatrix<f64>) -> DVector<f64> {
    let n = p.nrows();
    let mut a = p.transpose() - DMatrix::identity(n, n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    a.lu().solve(&b).expect("singular chain")
}

pub fn matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
}

/// Exact long-run reward of the index policy with budget 1 on `n` copies of
/// `arm`, ties broken uniformly.
pub fn joint_index_policy_value(arm: &ArmMdp, index: &[f64], n: usize) -> f64 {
    let s = arm.n_states();
    let size = s.pow(n as u32);
    let decode = |mut k: usize| -> Vec<usize> {
        (0..n)
            .map(|_| {
                let z = k % s;
                k /= s;
                z
            })
            .collect()
    };
    let mut p = DMatrix::zeros(size, size);
    let mut reward = DVector::zeros(size);
    for from in 0..size {
        let states = decode(from);
        reward[from] = states.iter().map(|&z| arm.rewards(Action::Passive)[z]).sum::<f64>();
        let best = states.iter().map(|&z| index[z]).fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> = (0..n).filter(|&i| index[states[i]] == best).collect();
        for &chosen in &tied {
            let w = 1.0 / tied.len() as f64;
            for to in 0..size {
                let next = decode(to);
                let prob: f64 = (0..n)
                    .map(|i| arm.prob(states[i], Action::from_selected(i == chosen), next[i]))
                    .product();
                p[(from, to)] += w * prob;
            }
        }
    }
    stationary(&p).dot(&reward)
}

/// One-sided paired t-test of `mean(a - b) > 0`; returns the p-value.
pub fn paired_p_greater(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if var == 0.0 {
        return if mean > 0.0 { 0.0 } else if mean < 0.0 { 1.0 } else { 0.5 };
    }
    let t = mean / (var / n).sqrt();
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).unwrap();
    1.0 - dist.cdf(t)
}
