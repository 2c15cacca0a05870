//! Every policy on the restart benchmark, summarised over the final 20%.

use rmab::instances::restart;
use rmab::policy::POLICY_NAMES;
use rmab::sim::tail_mean;
use rmab::whittle::SolverParams;
use rmab::{run_trials, PolicyConfig};

fn main() -> rmab::Result<()> {
    let inst = restart(5, 1, 0, &Default::default());
    let mut rows = Vec::new();
    for name in POLICY_NAMES {
        let proto = PolicyConfig::from_name(name)?.build(&inst, &SolverParams::default())?;
        let logs = run_trials(&inst, |_| Ok(proto.clone()), 5_000, 20, 0)?;
        let tails: Vec<f64> = logs.iter().map(|l| tail_mean(&l.per_step_total_reward, 0.2)).collect();
        let mean = tails.iter().sum::<f64>() / tails.len() as f64;
        let sd = (tails.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (tails.len() - 1) as f64).sqrt();
        rows.push((name, mean, sd / (tails.len() as f64).sqrt()));
    }
    rows.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (name, mean, se) in rows {
        println!("{name:<7} {mean:.4} ± {se:.4}");
    }
    Ok(())
}
