//! Per-element baseline: the same order-statistic tree, but every block
//! operation is driven as `m` independent single-element operations, each
//! paying its own root descent. This is what a plain order-statistic tree
//! without block awareness (and without the maximum pointer) would cost.

use wise_rbt::{check_block_range, OpOutcome, TreeError, WiseTree, WorkloadOp};

pub struct NaiveSeq {
    tree: WiseTree,
}

impl NaiveSeq {
    pub fn new() -> NaiveSeq {
        NaiveSeq {
            tree: WiseTree::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn counters(&self) -> wise_rbt::CostCounters {
        self.tree.counters()
    }

    pub fn reset_counters(&self) {
        self.tree.reset_counters();
    }

    /// Block-path append, used to build fixtures without charging the
    /// baseline for setup work.
    pub fn setup_append(&mut self, values: Vec<Vec<u8>>) {
        self.tree
            .block_append(values)
            .expect("non-empty setup block");
    }

    /// Applies one workload op element by element. Validity is checked up
    /// front with the same rules (and errors) as the block path, so the two
    /// structures stay output-identical.
    pub fn apply(&mut self, op: &WorkloadOp) -> Result<OpOutcome, TreeError> {
        let count = self.len();
        match op {
            WorkloadOp::Append { values } => {
                if values.is_empty() {
                    return Err(TreeError::EmptyBlock {
                        k: count + 1,
                        m: 0,
                        count,
                    });
                }
                for v in values {
                    let at = self.len() + 1;
                    self.tree.block_insert_by_descent(at, vec![v.clone()])?;
                }
                Ok(OpOutcome::Done)
            }
            WorkloadOp::Get { k, m } => {
                check_block_range(*k, *m, count)?;
                let mut out = Vec::with_capacity(*m);
                for i in 0..*m {
                    out.extend(self.tree.block_get(k + i, 1)?);
                }
                Ok(OpOutcome::Values(out))
            }
            WorkloadOp::Set { k, values } => {
                if values.is_empty() {
                    return Err(TreeError::EmptyBlock { k: *k, m: 0, count });
                }
                check_block_range(*k, values.len(), count)?;
                for (i, v) in values.iter().enumerate() {
                    self.tree.block_set(k + i, vec![v.clone()])?;
                }
                Ok(OpOutcome::Done)
            }
            WorkloadOp::Insert { k, values } => {
                if values.is_empty() {
                    return Err(TreeError::EmptyBlock { k: *k, m: 0, count });
                }
                if *k == 0 || *k > count + 1 {
                    return Err(TreeError::RankOutOfRange {
                        k: *k,
                        m: values.len(),
                        count,
                    });
                }
                for (i, v) in values.iter().enumerate() {
                    self.tree.block_insert_by_descent(k + i, vec![v.clone()])?;
                }
                Ok(OpOutcome::Done)
            }
            WorkloadOp::Delete { k, m } => {
                check_block_range(*k, *m, count)?;
                let mut removed = Vec::with_capacity(*m);
                for _ in 0..*m {
                    removed.extend(self.tree.block_delete(*k, 1)?);
                }
                Ok(OpOutcome::Removed(removed))
            }
        }
    }
}
