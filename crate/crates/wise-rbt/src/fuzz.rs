//! Differential fuzzing: replay a generated operation sequence against the
//! tree and the array oracle simultaneously, checking after every step that
//! results match, the structure validates, the one-child shape property
//! holds, the height stays within the red-black bound and the per-operation
//! counter budgets are respected. Failures come back as data together with a
//! greedily shrunk, replayable script.

use crate::counters::CostCounters;
use crate::error::TreeError;
use crate::key::RankKey;
use crate::oracle::OracleSeq;
use crate::tree::{FaultInjection, WiseTree};
use crate::workload::{apply_to_tree, format_workload, OpOutcome, WorkloadOp};

/// Deterministic 64-bit generator (splitmix64): the state advances by the
/// Weyl constant `0x9E3779B97F4A7C15` and the output is finalized with the
/// multipliers `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`. Identical
/// across platforms, so every fuzz case replays bit for bit.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..n` (`n > 0`), via the multiply-shift reduction.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}

/// Relative draw weights for the five operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpWeights {
    pub get: u32,
    pub set: u32,
    pub append: u32,
    pub insert: u32,
    pub delete: u32,
}

impl Default for OpWeights {
    fn default() -> OpWeights {
        OpWeights {
            get: 30,
            set: 15,
            append: 20,
            insert: 15,
            delete: 20,
        }
    }
}

/// A deterministic fuzz case: the same case always replays the same
/// operation sequence (generation draws only on the seed and the oracle's
/// evolving length).
#[derive(Debug, Clone)]
pub struct FuzzCase {
    pub seed: u64,
    pub op_count: usize,
    /// Upper bound on generated block sizes.
    pub max_block: usize,
    pub weights: OpWeights,
    /// Run the full structural validation on every `validate_every`-th op
    /// (1 = after every op).
    pub validate_every: usize,
    /// Soft cap on the sequence length; above it the generator leans on
    /// deletes so sequences hover around the cap.
    pub size_cap: usize,
}

impl FuzzCase {
    pub fn new(seed: u64, op_count: usize, max_block: usize) -> FuzzCase {
        FuzzCase {
            seed,
            op_count,
            max_block,
            weights: OpWeights::default(),
            validate_every: 1,
            size_cap: 10_000,
        }
    }
}

/// Outcome of one differential run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzOutcome {
    pub seed: u64,
    pub ops_executed: usize,
    pub failure: Option<FuzzFailure>,
}

impl FuzzOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzFailure {
    /// Index of the op whose checks failed (0-based within the run).
    pub op_index: usize,
    pub detail: String,
    /// Everything executed up to and including the failing op.
    pub ops: Vec<WorkloadOp>,
    /// Greedily shrunk reproduction; still fails, never longer than `ops`.
    pub shrunk: Vec<WorkloadOp>,
}

impl FuzzFailure {
    /// The shrunk reproduction as a replayable workload script.
    pub fn shrunk_script(&self) -> Vec<u8> {
        format_workload(&self.shrunk)
    }
}

const PAYLOAD_ALPHABET: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

fn random_payload(rng: &mut SplitMix64) -> Vec<u8> {
    let len = 1 + rng.below(8) as usize;
    (0..len)
        .map(|_| PAYLOAD_ALPHABET[rng.below(PAYLOAD_ALPHABET.len() as u64) as usize])
        .collect()
}

fn random_payloads(rng: &mut SplitMix64, m: usize) -> Vec<Vec<u8>> {
    (0..m).map(|_| random_payload(rng)).collect()
}

#[derive(Clone, Copy)]
enum OpKind {
    Get,
    Set,
    Append,
    Insert,
    Delete,
}

fn pick_kind(rng: &mut SplitMix64, weights: &OpWeights, len: usize, size_cap: usize) -> OpKind {
    // Above the cap, deletes dominate so the sequence length hovers there.
    let delete_w = if len >= size_cap {
        weights.delete.saturating_mul(4)
    } else {
        weights.delete
    };
    let total = weights.get + weights.set + weights.append + weights.insert + delete_w;
    let mut roll = rng.below(total.max(1) as u64) as u32;
    for (kind, w) in [
        (OpKind::Get, weights.get),
        (OpKind::Set, weights.set),
        (OpKind::Append, weights.append),
        (OpKind::Insert, weights.insert),
        (OpKind::Delete, delete_w),
    ] {
        if roll < w {
            return kind;
        }
        roll -= w;
    }
    OpKind::Get
}

/// A random *valid* op for a sequence of length `len`. Used by the mixed
/// benchmark workload; the fuzz generator adds deliberately invalid ops on
/// top of this.
pub fn random_valid_op(
    rng: &mut SplitMix64,
    len: usize,
    max_block: usize,
    weights: &OpWeights,
    size_cap: usize,
) -> WorkloadOp {
    let max_block = max_block.max(1);
    let kind = pick_kind(rng, weights, len, size_cap);
    // Reads, overwrites and deletes need at least one element.
    let kind = if len == 0 {
        match kind {
            OpKind::Get | OpKind::Set | OpKind::Delete => OpKind::Append,
            other => other,
        }
    } else {
        kind
    };
    match kind {
        OpKind::Get => {
            let k = 1 + rng.below(len as u64) as usize;
            let m = 1 + rng.below(max_block.min(len - k + 1) as u64) as usize;
            WorkloadOp::Get { k, m }
        }
        OpKind::Set => {
            let k = 1 + rng.below(len as u64) as usize;
            let m = 1 + rng.below(max_block.min(len - k + 1) as u64) as usize;
            WorkloadOp::Set {
                k,
                values: random_payloads(rng, m),
            }
        }
        OpKind::Append => {
            let m = 1 + rng.below(max_block as u64) as usize;
            WorkloadOp::Append {
                values: random_payloads(rng, m),
            }
        }
        OpKind::Insert => {
            let k = 1 + rng.below(len as u64 + 1) as usize;
            let m = 1 + rng.below(max_block as u64) as usize;
            WorkloadOp::Insert {
                k,
                values: random_payloads(rng, m),
            }
        }
        OpKind::Delete => {
            let k = 1 + rng.below(len as u64) as usize;
            let m = 1 + rng.below(max_block.min(len - k + 1) as u64) as usize;
            WorkloadOp::Delete { k, m }
        }
    }
}

/// A deliberately invalid op of a random kind, to exercise error parity.
fn random_invalid_op(rng: &mut SplitMix64, len: usize, max_block: usize) -> WorkloadOp {
    let max_block = max_block.max(1) as u64;
    match rng.below(6) {
        0 => WorkloadOp::Get {
            k: 0,
            m: 1 + rng.below(max_block) as usize,
        },
        1 => WorkloadOp::Get {
            k: len + 1 + rng.below(3) as usize,
            m: 1 + rng.below(max_block) as usize,
        },
        2 => WorkloadOp::Delete {
            k: 1 + rng.below(len as u64 + 1) as usize,
            m: len + 1 + rng.below(3) as usize,
        },
        3 => WorkloadOp::Set {
            k: 1 + rng.below(len as u64 + 1) as usize,
            values: vec![],
        },
        4 => WorkloadOp::Insert {
            k: len + 2 + rng.below(3) as usize,
            values: random_payloads(rng, 1),
        },
        _ => WorkloadOp::Append { values: vec![] },
    }
}

fn generate_op(rng: &mut SplitMix64, len: usize, case: &FuzzCase) -> WorkloadOp {
    if rng.below(100) < 5 {
        random_invalid_op(rng, len, case.max_block)
    } else {
        random_valid_op(rng, len, case.max_block, &case.weights, case.size_cap)
    }
}

fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

/// Applies `op` to both sides and runs every check. `Err(detail)` on the
/// first discrepancy.
fn apply_and_check(
    tree: &mut WiseTree,
    oracle: &mut OracleSeq,
    op: &WorkloadOp,
    validate: bool,
) -> Result<(), String> {
    let count_before = tree.len();
    let before = tree.counters();

    // Pre-state for the key-stability check on deletes.
    let delete_args = match op {
        WorkloadOp::Delete { k, m }
            if *k >= 1
                && *m >= 1
                && k.checked_add(m - 1).is_some_and(|end| end <= count_before) =>
        {
            Some((*k, *m, tree.keys_in_order()))
        }
        _ => None,
    };

    let tree_result = apply_to_tree(tree, op);
    let oracle_result = oracle.apply(op);
    if tree_result != oracle_result {
        return Err(format!(
            "result divergence on {op:?}: tree {tree_result:?}, oracle {oracle_result:?}"
        ));
    }

    let delta = tree.counters().since(&before);
    check_counter_budgets(op, &tree_result, count_before, &delta)?;

    if let (Some((k, m, pre_keys)), Ok(OpOutcome::Removed(removed))) = (delete_args, &tree_result) {
        // Splicing the removed keys back where the block sat must rebuild
        // the pre-delete key sequence exactly: survivors keep their keys.
        let post_keys = tree.keys_in_order();
        let rebuilt: Vec<&RankKey> = post_keys[..k - 1]
            .iter()
            .chain(removed.iter().map(|(key, _)| key))
            .chain(post_keys[k - 1..].iter())
            .collect();
        if rebuilt.len() != pre_keys.len() || rebuilt.iter().zip(&pre_keys).any(|(a, b)| **a != *b)
        {
            return Err(format!(
                "key stability broken by delete(k={k}, m={m}): surviving keys changed"
            ));
        }
    }

    if validate {
        // One combined pass: the validate_structure report, the one-child
        // shape property, the height and the element-wise oracle comparison.
        let check = tree.deep_check(Some(oracle.entries()));
        if !check.report.is_clean() {
            return Err(format!(
                "structural violations after {op:?}: {}",
                check.report
            ));
        }
        if !check.one_child_ok {
            return Err(format!("one-child shape property broken after {op:?}"));
        }
        let height = check.max_depth.saturating_sub(1) as f64;
        let bound = 2.0 * ((tree.len() + 1) as f64).log2();
        if height > bound + 1e-9 {
            return Err(format!(
                "height {height} exceeds red-black bound {bound:.2} at {} nodes",
                tree.len()
            ));
        }
        if let Some(rank) = check.mismatch_rank {
            return Err(format!("content divergence at rank {rank} after {op:?}"));
        }
    }
    Ok(())
}

/// Per-op counter budgets, checked only for operations that succeeded.
fn check_counter_budgets(
    op: &WorkloadOp,
    result: &Result<OpOutcome, TreeError>,
    count_before: usize,
    delta: &CostCounters,
) -> Result<(), String> {
    if result.is_err() {
        return Ok(());
    }
    match op {
        WorkloadOp::Get { m, .. } if *m >= 1 => {
            let budget = *m as u64 + 4 * ceil_log2(count_before as u64 + 1) + 4;
            if delta.node_visits > budget {
                return Err(format!(
                    "get visit budget exceeded: {} > {} (m={m}, n={count_before})",
                    delta.node_visits, budget
                ));
            }
            if delta.root_descents != 1 || delta.key_comparisons != 0 {
                return Err(format!("get cost profile off: {delta:?}"));
            }
        }
        WorkloadOp::Set { .. } => {
            if delta.root_descents != 1 || delta.key_comparisons != 0 {
                return Err(format!("set cost profile off: {delta:?}"));
            }
            if delta.rotations != 0 {
                return Err(format!("set must not rotate, got {}", delta.rotations));
            }
        }
        WorkloadOp::Append { values } => {
            if delta.root_descents != 0 || delta.key_comparisons != 0 {
                return Err(format!(
                    "append must not search: {} descents, {} comparisons",
                    delta.root_descents, delta.key_comparisons
                ));
            }
            if delta.rotations > 2 * values.len() as u64 {
                return Err(format!(
                    "append rotation budget exceeded: {} for m={}",
                    delta.rotations,
                    values.len()
                ));
            }
        }
        WorkloadOp::Insert { k, values } => {
            let expected = if *k == count_before + 1 { 0 } else { 1 };
            if delta.root_descents != expected {
                return Err(format!(
                    "insert performed {} root descents, expected {expected}",
                    delta.root_descents
                ));
            }
            if delta.key_comparisons != 0 {
                return Err(format!("insert compared keys: {}", delta.key_comparisons));
            }
            if delta.rotations > 2 * values.len() as u64 {
                return Err(format!(
                    "insert rotation budget exceeded: {} for m={}",
                    delta.rotations,
                    values.len()
                ));
            }
        }
        WorkloadOp::Delete { m, .. } if *m >= 1 => {
            if delta.root_descents != 1 || delta.key_comparisons != 0 {
                return Err(format!("delete cost profile off: {delta:?}"));
            }
            if delta.rotations > 3 * *m as u64 {
                return Err(format!(
                    "delete rotation budget exceeded: {} for m={m}",
                    delta.rotations
                ));
            }
        }
        _ => {}
    }
    Ok(())
}

/// Replays a fixed op list from scratch; true iff any per-op check fails.
fn replay_fails(ops: &[WorkloadOp], faults: FaultInjection) -> bool {
    let mut tree = WiseTree::new();
    tree.inject_faults(faults);
    let mut oracle = OracleSeq::new();
    for op in ops {
        if apply_and_check(&mut tree, &mut oracle, op, true).is_err() {
            return true;
        }
    }
    false
}

/// Greedy shrink: first drops chunks at halving granularity, then single
/// ops, repeating until no single removal keeps the failure alive.
fn shrink_ops(ops: &[WorkloadOp], faults: FaultInjection) -> Vec<WorkloadOp> {
    let mut cur: Vec<WorkloadOp> = ops.to_vec();
    let mut granularity = (cur.len() / 2).max(1);
    loop {
        let mut i = 0;
        while i < cur.len() && cur.len() > 1 {
            let end = (i + granularity).min(cur.len());
            let mut candidate = cur.clone();
            candidate.drain(i..end);
            if !candidate.is_empty() && replay_fails(&candidate, faults) {
                cur = candidate;
            } else {
                i = end;
            }
        }
        if granularity == 1 {
            break;
        }
        granularity = (granularity / 2).max(1);
    }
    // Final drop-one passes to a fixpoint.
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < cur.len() && cur.len() > 1 {
            let mut candidate = cur.clone();
            candidate.remove(i);
            if replay_fails(&candidate, faults) {
                cur = candidate;
                changed = true;
            } else {
                i += 1;
            }
        }
        if !changed {
            break;
        }
    }
    cur
}

/// Runs one differential fuzz case against a healthy tree.
pub fn run_differential(case: &FuzzCase) -> FuzzOutcome {
    run_differential_with_faults(case, FaultInjection::none())
}

/// Runs one differential fuzz case against a tree with the given bookkeeping
/// faults installed. With any fault active a campaign is expected to fail
/// fast — that is how the suite proves its validators bite.
pub fn run_differential_with_faults(case: &FuzzCase, faults: FaultInjection) -> FuzzOutcome {
    let mut rng = SplitMix64::new(case.seed);
    let mut tree = WiseTree::new();
    tree.inject_faults(faults);
    let mut oracle = OracleSeq::new();
    let mut ops: Vec<WorkloadOp> = Vec::new();
    let every = case.validate_every.max(1);
    for i in 0..case.op_count {
        // Generation draws on the oracle's length, so the op stream is
        // identical even when the tree misbehaves.
        let op = generate_op(&mut rng, oracle.len(), case);
        ops.push(op.clone());
        let validate = every == 1 || i % every == 0;
        if let Err(detail) = apply_and_check(&mut tree, &mut oracle, &op, validate) {
            let shrunk = shrink_ops(&ops, faults);
            return FuzzOutcome {
                seed: case.seed,
                ops_executed: i + 1,
                failure: Some(FuzzFailure {
                    op_index: i,
                    detail,
                    ops,
                    shrunk,
                }),
            };
        }
    }
    FuzzOutcome {
        seed: case.seed,
        ops_executed: case.op_count,
        failure: None,
    }
}
