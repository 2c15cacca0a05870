//! Restless multi-armed bandits.
//!
//! The crate is organised around a handful of pieces:
//!
//! - [`mdp`]: two-action arm MDPs and budgeted instances, with seeded sampling.
//! - [`whittle`]: exact Whittle indices by subsidised value iteration plus
//!   bisection, and an indexability check on the passive set.
//! - [`policy`]: Whittle-index Q-learning (WIQL) and the comparison policies
//!   (OPT, AB, Fu, Greedy, Random, Myopic) behind one select/update contract.
//! - [`sim`]: seeded episodes, parallel trials and aggregation to CSV series.
//! - [`instances`]: benchmark generators and the JSON instance file format.
//! - [`experiment`]: config-driven `index`, `run` and `compare` commands used by
//!   the `rmab` binary.
//!
//! ```
//! use rmab::instances;
//! use rmab::whittle::{index_table, SolverParams};
//!
//! let inst = instances::circulant(5, 1, 0);
//! let table = index_table(&inst.arms[0], &SolverParams::default()).unwrap();
//! assert!((table.get(2) - 1.0).abs() < 0.05);
//! ```

// NaN must fail the checks, hence `!(x < y)` rather than `x >= y`.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod experiment;
pub mod instances;
pub mod mdp;
pub mod policy;
pub mod rng;
pub mod sim;
pub mod whittle;

pub use error::{Error, Result};
pub use mdp::{Action, ArmMdp, RmabInstance, ScheduledChange};
pub use policy::{Policy, PolicyConfig, PolicyState};
pub use sim::{aggregate, run_episode, run_trials, AggregateSeries, TrialLog};
