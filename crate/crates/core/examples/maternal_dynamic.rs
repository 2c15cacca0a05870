//! Category shift at week 28: per-week rewards around the change.

use rmab::instances::{maternal_dynamic, MaternalCounts};
use rmab::whittle::SolverParams;
use rmab::{aggregate, run_trials, PolicyConfig};

fn main() -> rmab::Result<()> {
    let horizon = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(80);
    let inst = maternal_dynamic(&MaternalCounts::default(), 10, 28, 0, &Default::default())?;
    println!("{} scheduled replacements, all at week 28", inst.dynamics.len());
    let weeks = [1, 14, 27, 28, 29, 40, 60, horizon as usize];
    println!("week     {}", weeks.map(|w| format!("{w:>7}")).join(""));
    for name in ["opt", "wiql", "random"] {
        let proto = PolicyConfig::from_name(name)?.build(&inst, &SolverParams::default())?;
        let series = aggregate(&run_trials(&inst, |_| Ok(proto.clone()), horizon, 30, 0)?, 5)?;
        let row: String = weeks.iter().map(|&w| format!("{:>7.2}", series.moving_avg[w - 1])).collect();
        println!("{name:<8} {row}");
    }
    Ok(())
}
