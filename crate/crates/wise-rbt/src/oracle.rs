//! Brute-force mirror of the block operations on a plain dynamic array.
//!
//! The oracle is the ground truth for differential testing and doubles as
//! the array baseline in benchmarks. It stores the same `(key, payload)`
//! pairs the tree does and synthesizes keys with the identical
//! [`synth_keys`] routine, so key-stability checks compare real values. All
//! sequence manipulation is direct slicing and splicing — no tree logic is
//! shared — and errors carry the exact same taxonomy as the tree.

use crate::error::{check_block_range, TreeError};
use crate::key::{synth_keys, RankKey};
use crate::workload::{OpOutcome, WorkloadOp};

/// Dynamic-array mirror of the sequence: keys strictly increase by index.
#[derive(Debug, Clone, Default)]
pub struct OracleSeq {
    entries: Vec<(RankKey, Vec<u8>)>,
}

impl OracleSeq {
    pub fn new() -> OracleSeq {
        OracleSeq::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn key_at(&self, idx: usize) -> &RankKey {
        &self.entries[idx].0
    }

    pub fn payload_at(&self, idx: usize) -> &[u8] {
        &self.entries[idx].1
    }

    /// The whole mirror, in rank order.
    pub fn entries(&self) -> &[(RankKey, Vec<u8>)] {
        &self.entries
    }

    pub fn payloads(&self) -> Vec<Vec<u8>> {
        self.entries.iter().map(|(_, p)| p.clone()).collect()
    }

    pub fn keys(&self) -> Vec<RankKey> {
        self.entries.iter().map(|(k, _)| k.clone()).collect()
    }

    /// Applies one workload op by array splicing, with the same results and
    /// errors as the tree.
    pub fn apply(&mut self, op: &WorkloadOp) -> Result<OpOutcome, TreeError> {
        match op {
            WorkloadOp::Append { values } => {
                let count = self.len();
                if values.is_empty() {
                    return Err(TreeError::EmptyBlock {
                        k: count + 1,
                        m: 0,
                        count,
                    });
                }
                let pred = self.entries.last().map(|(k, _)| k.clone());
                let keys = synth_keys(pred.as_ref(), None, values.len())
                    .expect("append bounds are always ordered");
                self.entries
                    .extend(keys.into_iter().zip(values.iter().cloned()));
                Ok(OpOutcome::Done)
            }
            WorkloadOp::Get { k, m } => {
                check_block_range(*k, *m, self.len())?;
                if *m == 0 {
                    return Ok(OpOutcome::Values(Vec::new()));
                }
                Ok(OpOutcome::Values(
                    self.entries[k - 1..k - 1 + m]
                        .iter()
                        .map(|(_, p)| p.clone())
                        .collect(),
                ))
            }
            WorkloadOp::Set { k, values } => {
                let count = self.len();
                if values.is_empty() {
                    return Err(TreeError::EmptyBlock { k: *k, m: 0, count });
                }
                check_block_range(*k, values.len(), count)?;
                for (slot, v) in self.entries[k - 1..k - 1 + values.len()]
                    .iter_mut()
                    .zip(values)
                {
                    slot.1 = v.clone();
                }
                Ok(OpOutcome::Done)
            }
            WorkloadOp::Insert { k, values } => {
                let count = self.len();
                let m = values.len();
                if m == 0 {
                    return Err(TreeError::EmptyBlock { k: *k, m: 0, count });
                }
                if *k == 0 || *k > count + 1 {
                    return Err(TreeError::RankOutOfRange { k: *k, m, count });
                }
                let pred = (*k >= 2).then(|| self.entries[k - 2].0.clone());
                let succ = (*k <= count).then(|| self.entries[k - 1].0.clone());
                let keys = synth_keys(pred.as_ref(), succ.as_ref(), m)
                    .expect("neighbor keys are strictly ordered");
                let tail = self.entries.split_off(k - 1);
                self.entries
                    .extend(keys.into_iter().zip(values.iter().cloned()));
                self.entries.extend(tail);
                Ok(OpOutcome::Done)
            }
            WorkloadOp::Delete { k, m } => {
                check_block_range(*k, *m, self.len())?;
                if *m == 0 {
                    return Ok(OpOutcome::Removed(Vec::new()));
                }
                let removed: Vec<(RankKey, Vec<u8>)> =
                    self.entries.drain(k - 1..k - 1 + m).collect();
                Ok(OpOutcome::Removed(removed))
            }
        }
    }
}
