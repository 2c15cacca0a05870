//! Passive-set monotonicity on a subsidy grid, for an indexable and a
//! non-indexable arm.

use rmab::instances::{circulant_arm, non_indexable_arm, restart_arm};
use rmab::whittle::{check_indexability, lambda_grid, whittle_index, Mode, SolverParams};

fn main() -> rmab::Result<()> {
    let arms = [
        ("circulant", circulant_arm()),
        ("restart", restart_arm(&Default::default())),
        ("non_indexable", non_indexable_arm()),
    ];
    for (name, arm) in &arms {
        let grid = lambda_grid(SolverParams::default().bound_for(arm), 0.05);
        let verdict = check_indexability(arm, &grid, Mode::AverageReward, 1e-9, 100_000)?;
        println!("{name:<14} {verdict:?}");
    }

    match whittle_index(&arms[2].1, 0, &SolverParams::default()) {
        Ok(x) => println!("unexpected index {x}"),
        Err(e) => println!("whittle_index refuses: {e}"),
    }
    Ok(())
}
