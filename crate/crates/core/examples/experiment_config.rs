//! Driving the `run` and `compare` pipeline from a JSON config.

use rmab::experiment::{cmd_compare, cmd_run, format_comparison, ExperimentConfig};

const CONFIG: &str = r#"{
    "name": "circ",
    "instance": {"generator": "circulant", "n_arms": 5, "budget": 1},
    "policies": ["opt", {"wiql": {"discount": 1.0}}, {"fu": {"lambdas": [-1, 0, 1]}}, "random"],
    "T": 2000,
    "trials": 10,
    "base_seed": 3,
    "window": 50
}"#;

fn main() -> rmab::Result<()> {
    let mut cfg = ExperimentConfig::from_json(CONFIG)?;
    cfg.out_dir = std::env::temp_dir().join("rmab_experiment_example");
    let manifest = cmd_run(&cfg)?;
    let aggs: Vec<_> = manifest.runs.iter().map(|r| r.agg.clone()).collect();
    print!("{}", format_comparison(&cmd_compare(&aggs, 0.2)?));
    println!("manifest in {}", cfg.out_dir.display());
    Ok(())
}
