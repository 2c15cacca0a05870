//! The S/P/L engagement model with 10/10/30 arms of categories A/B/C.

use rmab::instances::{maternal_arm, maternal_static, MaternalCategory, MaternalCounts, PERSUADABLE};
use rmab::whittle::{index_table, SolverParams};
use rmab::{run_trials, PolicyConfig};

fn main() -> rmab::Result<()> {
    let shape = Default::default();
    for cat in [MaternalCategory::A, MaternalCategory::B, MaternalCategory::C] {
        let t = index_table(&maternal_arm(&cat, &shape), &SolverParams::default())?;
        println!("category {} index at P: {:.3}", cat.label, t.get(PERSUADABLE));
    }

    let budget = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let inst = maternal_static(&MaternalCounts::default(), budget, &shape)?;
    println!("N = {}, M = {budget}, 80 weeks, 30 trials", inst.n_arms());
    for name in ["opt", "myopic", "wiql", "greedy", "random"] {
        let proto = PolicyConfig::from_name(name)?.build(&inst, &SolverParams::default())?;
        let logs = run_trials(&inst, |_| Ok(proto.clone()), 80, 30, 0)?;
        let last20 = logs
            .iter()
            .map(|l| l.per_step_total_reward[60..].iter().sum::<f64>() / 20.0)
            .sum::<f64>()
            / logs.len() as f64;
        println!("{name:<7} mean weekly reward over the last 20 weeks: {last20:.2}");
    }
    Ok(())
}
