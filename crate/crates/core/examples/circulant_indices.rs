//! Exact Whittle indices of the circulant arm under both optimality criteria.

use rmab::instances::circulant_arm;
use rmab::whittle::{index_table, solve_subsidized, Mode, SolverParams};

fn main() -> rmab::Result<()> {
    let arm = circulant_arm();
    for mode in [Mode::AverageReward, Mode::Discounted(0.99)] {
        let params = SolverParams { mode, ..SolverParams::default() };
        let table = index_table(&arm, &params)?;
        println!("{mode:?}: {:.4?}", table.0);
    }

    // At λ = 1 state 2 is indifferent between the two actions.
    let sol = solve_subsidized(&arm, 1.0, Mode::AverageReward, 1e-10, 100_000)?;
    println!(
        "λ = 1: q_passive(2) = {:.6}, q_active(2) = {:.6}, gain = {:.4}",
        sol.q_passive[2],
        sol.q_active[2],
        sol.gain.unwrap()
    );
    Ok(())
}
