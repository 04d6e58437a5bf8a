//! Rank-indexed dynamic sequence built on a red-black tree whose nodes store
//! only the size of their *left* subtree, plus a standing reference to the
//! maximum node.
//!
//! Elements are addressed purely by 1-based rank and manipulated in blocks
//! of `m` consecutive elements:
//!
//! * [`WiseTree::block_get`] / [`WiseTree::block_set`] — one rank descent
//!   plus an in-order walk, `O(m + log n)` nodes touched;
//! * [`WiseTree::block_append`] — no search at all, each node goes to the
//!   right of the tracked maximum;
//! * [`WiseTree::block_insert`] — one rank descent for the whole block, each
//!   follow-up node placed in constant time next to the previous one;
//! * [`WiseTree::block_delete`] — one rank descent, then each target's
//!   in-order successor is both the next target and the anchor for the
//!   left-size compensation. Surviving keys are never renumbered, which is
//!   what makes [`WiseTree::block_reinsert`] (undo of a delete) possible.
//!
//! Every operation feeds always-on [`CostCounters`], so the claimed cost
//! model is checked by tests rather than asserted in prose. The
//! [`oracle`] and [`fuzz`] modules provide the
//! array mirror and the differential campaign runner used for verification.
//!
//! ```
//! use wise_rbt::WiseTree;
//!
//! let val = |s: &str| s.as_bytes().to_vec();
//! let mut seq = WiseTree::new();
//! seq.block_append(vec![val("a"), val("b"), val("e")])?;
//! seq.block_insert(3, vec![val("c"), val("d")])?;
//! assert_eq!(
//!     seq.block_get(1, 5)?,
//!     vec![val("a"), val("b"), val("c"), val("d"), val("e")],
//! );
//!
//! // Deletes hand back the removed entries, keys included, so they can be
//! // reinserted verbatim (undo).
//! let removed = seq.block_delete(2, 3)?;
//! assert_eq!(seq.block_get(1, 2)?, vec![val("a"), val("e")]);
//! seq.block_reinsert(removed)?;
//! assert_eq!(seq.len(), 5);
//!
//! // Cost accounting is always on.
//! let before = seq.counters();
//! seq.block_append(vec![val("f")])?;
//! assert_eq!(seq.counters().since(&before).root_descents, 0);
//! # Ok::<(), wise_rbt::TreeError>(())
//! ```

pub mod block;
pub mod counters;
pub mod error;
pub mod fuzz;
pub mod key;
pub mod oracle;
pub mod tree;
pub mod validate;
pub mod workload;

#[cfg(test)]
pub(crate) mod testutil;

pub use counters::CostCounters;
pub use error::{check_block_range, TreeError};
pub use fuzz::{
    run_differential, run_differential_with_faults, FuzzCase, FuzzFailure, FuzzOutcome, OpWeights,
    SplitMix64,
};
pub use key::{synth_keys, RankKey};
pub use oracle::OracleSeq;
pub use tree::{FaultInjection, NodeHandle, WiseTree};
pub use validate::{ValidationReport, Violation, ViolationKind};
pub use workload::{
    apply_to_tree, format_op, format_workload, parse_workload, OpOutcome, ParseError, WorkloadOp,
};
