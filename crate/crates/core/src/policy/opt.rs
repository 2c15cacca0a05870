//! Index policy with exact Whittle indices (full model knowledge).

use super::select::{check_budget, top_m};
use super::wiql::check_observation;
use crate::error::Result;
use crate::mdp::{ArmMdp, RmabInstance};
use crate::rng::Stream;
use crate::whittle::{index_table, index_tables, IndexTable, SolverParams};

#[derive(Debug, Clone)]
pub struct Opt {
    tables: Vec<IndexTable>,
    budget: usize,
    solver: SolverParams,
}

impl Opt {
    pub fn new(instance: &RmabInstance, solver: &SolverParams) -> Result<Self> {
        Ok(Self::from_tables(index_tables(&instance.arms, solver)?, instance.budget, solver.clone()))
    }

    pub fn from_tables(tables: Vec<IndexTable>, budget: usize, solver: SolverParams) -> Self {
        Self { tables, budget, solver }
    }

    pub fn tables(&self) -> &[IndexTable] {
        &self.tables
    }

    pub fn select(&self, observed: &[usize], t: u64, rng: &mut Stream) -> Result<Vec<usize>> {
        check_observation(observed, self.tables.len(), t)?;
        check_budget(self.tables.len(), self.budget)?;
        let scores: Vec<f64> = observed
            .iter()
            .zip(&self.tables)
            .map(|(&z, table)| table.get(z))
            .collect();
        top_m(&scores, self.budget, rng)
    }

    /// Recomputes the arm's indices; the policy knows the true model.
    pub fn arm_replaced(&mut self, arm: usize, mdp: &ArmMdp) -> Result<()> {
        self.tables[arm] = index_table(mdp, &self.solver)?;
        Ok(())
    }
}
