//! WIQL on five circulant arms with budget one, against OPT, Greedy and Random.
//!
//! Run with `cargo run --release --example wiql_circulant`.

use rmab::instances::circulant;
use rmab::policy::PolicyState;
use rmab::whittle::SolverParams;
use rmab::{aggregate, run_trials, PolicyConfig};

fn main() -> rmab::Result<()> {
    let inst = circulant(5, 1, 0);
    let (horizon, trials) = (10_000, 30);
    for name in ["opt", "wiql", "greedy", "random"] {
        let proto = PolicyConfig::from_name(name)?.build(&inst, &SolverParams::default())?;
        let logs = run_trials(&inst, |_| Ok(proto.clone()), horizon, trials, 0)?;
        let series = aggregate(&logs, 500)?;
        let tail = rmab::sim::tail_mean(&series.mean, 0.2);
        println!("{name:<7} final 20% mean {tail:.4}  smoothed at T: {:.4}", series.moving_avg.last().unwrap());
    }

    // learned index estimates after one long WIQL episode
    let mut wiql = PolicyConfig::from_name("wiql")?.build(&inst, &SolverParams::default())?;
    rmab::run_episode(&inst, &mut wiql, 50_000, 1)?;
    if let PolicyState::Wiql(w) = &wiql {
        let est: Vec<f64> = (0..4).map(|z| w.table.lambda_est(0, z)).collect();
        println!("arm 0 index estimates Q(z,1) - Q(z,0): {est:.3?}");
    }
    Ok(())
}
