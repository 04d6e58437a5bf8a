use thiserror::Error;

/// Errors raised by rank-addressed operations.
///
/// Every variant carries the offending `(k, m, count)` triple: the 1-based
/// start rank, the block length and the sequence length at the time the
/// operation was attempted. Where a field has no meaningful value in the
/// caller's context (e.g. `k` for a key-addressed reinsertion that never
/// resolved a rank) it is reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum TreeError {
    /// The block `[k, k+m-1]` does not fit inside the current sequence.
    #[error("rank out of range (k={k}, m={m}, count={count})")]
    RankOutOfRange { k: usize, m: usize, count: usize },
    /// An empty block was passed to an operation that requires `m >= 1`.
    #[error("empty block (k={k}, m={m}, count={count})")]
    EmptyBlock { k: usize, m: usize, count: usize },
    /// Fixed-width key arithmetic would overflow. Unreachable with the
    /// arbitrary-precision keys used here; kept so callers that configure a
    /// fixed-width key policy share one taxonomy.
    #[error("key overflow (k={k}, m={m}, count={count})")]
    KeyOverflow { k: usize, m: usize, count: usize },
    /// A caller-supplied key-order precondition was violated.
    #[error("invariant violation (k={k}, m={m}, count={count})")]
    InvariantViolation { k: usize, m: usize, count: usize },
}

impl TreeError {
    /// Stable variant name, used by the workload runner's `ERR <kind>` lines.
    pub fn kind_name(&self) -> &'static str {
        match self {
            TreeError::RankOutOfRange { .. } => "RankOutOfRange",
            TreeError::EmptyBlock { .. } => "EmptyBlock",
            TreeError::KeyOverflow { .. } => "KeyOverflow",
            TreeError::InvariantViolation { .. } => "InvariantViolation",
        }
    }
}

/// Validates that the block `[k, k+m-1]` lies inside a sequence of `count`
/// elements. `k = 0` is always out of range; `m = 0` is accepted (the block
/// is empty, so it cannot overrun). Shared by the tree, the array oracle and
/// the per-element baseline so all three report identical errors.
pub fn check_block_range(k: usize, m: usize, count: usize) -> Result<(), TreeError> {
    if k == 0 {
        return Err(TreeError::RankOutOfRange { k, m, count });
    }
    if m == 0 {
        return Ok(());
    }
    match k.checked_add(m - 1) {
        Some(end) if end <= count => Ok(()),
        _ => Err(TreeError::RankOutOfRange { k, m, count }),
    }
}
