use std::sync::atomic::{AtomicU64, Ordering};

/// Snapshot of the tree's monotone cost tallies.
///
/// Accounting rules:
/// * `node_visits` — one per node touched by a rank descent, a key descent,
///   a successor step or an in-order block walk. Rebalancing does not count
///   visits; it has its own counters.
/// * `key_comparisons` — one per key comparison the tree performs. Only
///   key-addressed descents (reinsertion) compare keys; rank-addressed
///   operations never do.
/// * `rotations` — one per rotation.
/// * `recolorings` — one per recoloring step of the fixup machinery: a
///   red-uncle color flip, a rotation's color adjustment, one delete-fixup
///   case's color writes, or the final root/deficit blacken. Steps that end
///   up changing nothing are not counted.
/// * `fixup_iterations` — one per pass of an insert- or delete-fixup loop.
/// * `root_descents` — one per search started at the root. Appends and the
///   follow-up placements inside a block insertion perform none.
///
/// Counters are always on and only reset explicitly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CostCounters {
    pub node_visits: u64,
    pub key_comparisons: u64,
    pub rotations: u64,
    pub recolorings: u64,
    pub fixup_iterations: u64,
    pub root_descents: u64,
}

impl CostCounters {
    /// Component-wise difference against an earlier snapshot of the same
    /// counters.
    pub fn since(&self, earlier: &CostCounters) -> CostCounters {
        CostCounters {
            node_visits: self.node_visits - earlier.node_visits,
            key_comparisons: self.key_comparisons - earlier.key_comparisons,
            rotations: self.rotations - earlier.rotations,
            recolorings: self.recolorings - earlier.recolorings,
            fixup_iterations: self.fixup_iterations - earlier.fixup_iterations,
            root_descents: self.root_descents - earlier.root_descents,
        }
    }
}

/// Live counter cells. Relaxed atomics so read-only operations can tally
/// visits through a shared reference.
#[derive(Debug, Default)]
pub(crate) struct CounterCells {
    node_visits: AtomicU64,
    key_comparisons: AtomicU64,
    rotations: AtomicU64,
    recolorings: AtomicU64,
    fixup_iterations: AtomicU64,
    root_descents: AtomicU64,
}

impl CounterCells {
    #[inline]
    pub(crate) fn visit(&self) {
        self.node_visits.fetch_add(1, Ordering::Relaxed);
    }

    #[inline]
    pub(crate) fn comparison(&self) {
        self.key_comparisons.fetch_add(1, Ordering::Relaxed);
    }

    #[inline]
    pub(crate) fn rotation(&self) {
        self.rotations.fetch_add(1, Ordering::Relaxed);
    }

    #[inline]
    pub(crate) fn recoloring(&self) {
        self.recolorings.fetch_add(1, Ordering::Relaxed);
    }

    #[inline]
    pub(crate) fn fixup_iteration(&self) {
        self.fixup_iterations.fetch_add(1, Ordering::Relaxed);
    }

    #[inline]
    pub(crate) fn root_descent(&self) {
        self.root_descents.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn snapshot(&self) -> CostCounters {
        CostCounters {
            node_visits: self.node_visits.load(Ordering::Relaxed),
            key_comparisons: self.key_comparisons.load(Ordering::Relaxed),
            rotations: self.rotations.load(Ordering::Relaxed),
            recolorings: self.recolorings.load(Ordering::Relaxed),
            fixup_iterations: self.fixup_iterations.load(Ordering::Relaxed),
            root_descents: self.root_descents.load(Ordering::Relaxed),
        }
    }

    pub(crate) fn reset(&self) {
        self.node_visits.store(0, Ordering::Relaxed);
        self.key_comparisons.store(0, Ordering::Relaxed);
        self.rotations.store(0, Ordering::Relaxed);
        self.recolorings.store(0, Ordering::Relaxed);
        self.fixup_iterations.store(0, Ordering::Relaxed);
        self.root_descents.store(0, Ordering::Relaxed);
    }

    pub(crate) fn from_snapshot(s: CostCounters) -> CounterCells {
        CounterCells {
            node_visits: AtomicU64::new(s.node_visits),
            key_comparisons: AtomicU64::new(s.key_comparisons),
            rotations: AtomicU64::new(s.rotations),
            recolorings: AtomicU64::new(s.recolorings),
            fixup_iterations: AtomicU64::new(s.fixup_iterations),
            root_descents: AtomicU64::new(s.root_descents),
        }
    }
}
