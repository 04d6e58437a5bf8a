use std::fmt;

use crate::counters::{CostCounters, CounterCells};
use crate::error::TreeError;
use crate::key::RankKey;

/// Sentinel index standing in for NIL. NIL counts as black and is excluded
/// from every `left_size`.
pub(crate) const NIL: usize = usize::MAX;

#[cfg(feature = "hook-stats")]
pub static HOOK_LEFT: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
#[cfg(feature = "hook-stats")]
pub static HOOK_RIGHT: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Color {
    Red,
    Black,
}

#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub(crate) key: RankKey,
    pub(crate) payload: Vec<u8>,
    pub(crate) color: Color,
    pub(crate) parent: usize,
    pub(crate) left: usize,
    pub(crate) right: usize,
    /// Number of real nodes in the left subtree. Stored signed because block
    /// insertion and deletion pre-adjust the field mid-operation, which can
    /// take it transiently negative; it is non-negative again at every
    /// operation boundary.
    pub(crate) left_size: i64,
}

/// Opaque reference to a live node. Valid until the next mutating operation
/// on the tree it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeHandle(pub(crate) usize);

/// Switches that disable individual pieces of left-size bookkeeping.
///
/// These exist so the verification suite can demonstrate that its validators
/// are not vacuous: a differential fuzz campaign against a tree with any one
/// of these faults injected must fail quickly. They are never set in normal
/// operation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FaultInjection {
    /// Skip the left-size adjustment every rotation performs.
    pub skip_rotation_adjustment: bool,
    /// Skip the left-size pre-increment on the block-insert descent.
    pub skip_insert_preincrement: bool,
    /// Skip the left-size compensation applied before delete-fixup rotations.
    pub skip_delete_compensation: bool,
}

impl FaultInjection {
    pub fn none() -> FaultInjection {
        FaultInjection::default()
    }
}

/// Rank-indexed sequence stored as a red-black tree in which every node
/// carries the size of its left subtree, plus a standing reference to the
/// maximum-key node so appends need no search.
///
/// All addressing is by 1-based rank. Nodes live in an arena indexed by
/// `usize`, with parent links, so fixups and successor climbs never
/// re-descend from the root. One logical writer at a time; reads through a
/// shared reference are safe and only bump the (atomic) cost counters.
pub struct WiseTree {
    nodes: Vec<Node>,
    free: Vec<usize>,
    root: usize,
    max_node: usize,
    count: usize,
    pub(crate) counters: CounterCells,
    pub(crate) faults: FaultInjection,
}

impl Default for WiseTree {
    fn default() -> Self {
        WiseTree::new()
    }
}

impl fmt::Debug for WiseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WiseTree")
            .field("count", &self.count)
            .field("root", &self.root)
            .field("max_node", &self.max_node)
            .finish()
    }
}

impl Clone for WiseTree {
    fn clone(&self) -> Self {
        WiseTree {
            nodes: self.nodes.clone(),
            free: self.free.clone(),
            root: self.root,
            max_node: self.max_node,
            count: self.count,
            counters: CounterCells::from_snapshot(self.counters.snapshot()),
            faults: self.faults,
        }
    }
}

impl WiseTree {
    pub fn new() -> WiseTree {
        WiseTree {
            nodes: Vec::new(),
            free: Vec::new(),
            root: NIL,
            max_node: NIL,
            count: 0,
            counters: CounterCells::default(),
            faults: FaultInjection::default(),
        }
    }

    /// Number of elements in the sequence.
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Snapshot of the cost counters.
    pub fn counters(&self) -> CostCounters {
        self.counters.snapshot()
    }

    pub fn reset_counters(&self) {
        self.counters.reset();
    }

    /// Installs bookkeeping faults. Verification aid only; see
    /// [`FaultInjection`].
    pub fn inject_faults(&mut self, faults: FaultInjection) {
        self.faults = faults;
    }

    pub fn payload(&self, h: NodeHandle) -> &[u8] {
        &self.nodes[h.0].payload
    }

    pub fn key(&self, h: NodeHandle) -> &RankKey {
        &self.nodes[h.0].key
    }

    /// Longest root-to-leaf path, counted in edges. Empty tree: 0.
    pub fn height(&self) -> usize {
        if self.root == NIL {
            return 0;
        }
        let mut best = 0usize;
        let mut stack = vec![(self.root, 0usize)];
        let mut steps = 0usize;
        let cap = 2 * self.nodes.len() + 2;
        while let Some((v, depth)) = stack.pop() {
            steps += 1;
            if steps > cap {
                break;
            }
            best = best.max(depth);
            let n = &self.nodes[v];
            if n.left != NIL {
                stack.push((n.left, depth + 1));
            }
            if n.right != NIL {
                stack.push((n.right, depth + 1));
            }
        }
        best
    }

    /// The node at in-order position `k` (1-based). Descends from the root
    /// using left-subtree sizes only; no key is ever compared.
    pub fn kth_smallest(&self, k: usize) -> Result<NodeHandle, TreeError> {
        if k == 0 || k > self.count {
            return Err(TreeError::RankOutOfRange {
                k,
                m: 1,
                count: self.count,
            });
        }
        Ok(NodeHandle(self.select_raw(k)))
    }

    /// The node with the next-larger key, or `None` when `h` is the maximum.
    /// Pure read apart from visit counting.
    pub fn in_order_successor(&self, h: NodeHandle) -> Option<NodeHandle> {
        let x = h.0;
        let r = self.nodes[x].right;
        if r != NIL {
            let mut v = r;
            self.counters.visit();
            while self.nodes[v].left != NIL {
                v = self.nodes[v].left;
                self.counters.visit();
            }
            return Some(NodeHandle(v));
        }
        let s = self.climb_successor(x);
        if s == NIL {
            None
        } else {
            Some(NodeHandle(s))
        }
    }

    // ── arena plumbing ──────────────────────────────────────────────────

    pub(crate) fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub(crate) fn node_mut(&mut self, i: usize) -> &mut Node {
        &mut self.nodes[i]
    }

    pub(crate) fn root_idx(&self) -> usize {
        self.root
    }

    /// Installs `idx` as the root. Used when attaching into an empty tree.
    pub(crate) fn force_root(&mut self, idx: usize) {
        self.nodes[idx].parent = NIL;
        self.root = idx;
    }

    pub(crate) fn max_idx(&self) -> usize {
        self.max_node
    }

    pub(crate) fn set_max_idx(&mut self, i: usize) {
        self.max_node = i;
    }

    pub(crate) fn set_count(&mut self, c: usize) {
        self.count = c;
    }

    pub(crate) fn arena_len(&self) -> usize {
        self.nodes.len()
    }

    /// Allocates a node detached from the tree; the caller links it.
    pub(crate) fn alloc(&mut self, key: RankKey, payload: Vec<u8>, color: Color) -> usize {
        let node = Node {
            key,
            payload,
            color,
            parent: NIL,
            left: NIL,
            right: NIL,
            left_size: 0,
        };
        match self.free.pop() {
            Some(i) => {
                self.nodes[i] = node;
                i
            }
            None => {
                self.nodes.push(node);
                self.nodes.len() - 1
            }
        }
    }

    pub(crate) fn free_node(&mut self, i: usize) {
        // Drop the payload now; the slot itself is recycled.
        self.nodes[i].payload = Vec::new();
        self.free.push(i);
    }

    #[inline]
    pub(crate) fn is_red(&self, i: usize) -> bool {
        i != NIL && self.nodes[i].color == Color::Red
    }

    #[inline]
    pub(crate) fn is_black(&self, i: usize) -> bool {
        i == NIL || self.nodes[i].color == Color::Black
    }

    /// Recolors `i`; reports whether the color actually changed. The caller
    /// groups changes into counted recoloring events.
    pub(crate) fn set_color(&mut self, i: usize, color: Color) -> bool {
        if self.nodes[i].color != color {
            self.nodes[i].color = color;
            true
        } else {
            false
        }
    }

    /// Counts one recoloring event if any of the grouped writes changed a
    /// color.
    #[inline]
    fn note_recolor(&self, changed: bool) {
        if changed {
            self.counters.recoloring();
        }
    }

    // ── rotations ───────────────────────────────────────────────────────

    /// Left rotation of `x`; `x.right` must be a real node. The new parent
    /// gains `x` and x's left subtree in its left subtree, so its left size
    /// grows by `x.left_size + 1`. No other left size changes.
    pub(crate) fn rotate_left(&mut self, x: usize) {
        let y = self.nodes[x].right;
        debug_assert!(y != NIL, "rotate_left requires a real right child");
        self.counters.rotation();
        if !self.faults.skip_rotation_adjustment {
            self.nodes[y].left_size += self.nodes[x].left_size + 1;
        }
        let yl = self.nodes[y].left;
        self.nodes[x].right = yl;
        if yl != NIL {
            self.nodes[yl].parent = x;
        }
        let xp = self.nodes[x].parent;
        self.nodes[y].parent = xp;
        if xp == NIL {
            self.root = y;
        } else if self.nodes[xp].left == x {
            self.nodes[xp].left = y;
        } else {
            self.nodes[xp].right = y;
        }
        self.nodes[y].left = x;
        self.nodes[x].parent = y;
    }

    /// Right rotation of `x`; `x.left` must be a real node. `x` loses its
    /// old left child and that child's left subtree, so its left size
    /// shrinks by `x.left.left_size + 1`.
    pub(crate) fn rotate_right(&mut self, x: usize) {
        let y = self.nodes[x].left;
        debug_assert!(y != NIL, "rotate_right requires a real left child");
        self.counters.rotation();
        if !self.faults.skip_rotation_adjustment {
            self.nodes[x].left_size -= self.nodes[y].left_size + 1;
        }
        let yr = self.nodes[y].right;
        self.nodes[x].left = yr;
        if yr != NIL {
            self.nodes[yr].parent = x;
        }
        let xp = self.nodes[x].parent;
        self.nodes[y].parent = xp;
        if xp == NIL {
            self.root = y;
        } else if self.nodes[xp].right == x {
            self.nodes[xp].right = y;
        } else {
            self.nodes[xp].left = y;
        }
        self.nodes[y].right = x;
        self.nodes[x].parent = y;
    }

    // ── fixups ──────────────────────────────────────────────────────────

    /// Restores the red-black properties after attaching the red node `z`.
    /// At most two rotations.
    pub(crate) fn insert_fixup(&mut self, mut z: usize) {
        loop {
            let p = self.nodes[z].parent;
            if p == NIL || self.is_black(p) {
                break;
            }
            self.counters.fixup_iteration();
            // p is red, so it cannot be the root and the grandparent exists.
            let gp = self.nodes[p].parent;
            if self.nodes[gp].left == p {
                let uncle = self.nodes[gp].right;
                if self.is_red(uncle) {
                    let mut changed = self.set_color(p, Color::Black);
                    changed |= self.set_color(uncle, Color::Black);
                    changed |= self.set_color(gp, Color::Red);
                    self.note_recolor(changed);
                    z = gp;
                } else {
                    if self.nodes[p].right == z {
                        z = p;
                        self.rotate_left(z);
                    }
                    let p2 = self.nodes[z].parent;
                    let gp2 = self.nodes[p2].parent;
                    let mut changed = self.set_color(p2, Color::Black);
                    changed |= self.set_color(gp2, Color::Red);
                    self.note_recolor(changed);
                    self.rotate_right(gp2);
                }
            } else {
                let uncle = self.nodes[gp].left;
                if self.is_red(uncle) {
                    let mut changed = self.set_color(p, Color::Black);
                    changed |= self.set_color(uncle, Color::Black);
                    changed |= self.set_color(gp, Color::Red);
                    self.note_recolor(changed);
                    z = gp;
                } else {
                    if self.nodes[p].left == z {
                        z = p;
                        self.rotate_right(z);
                    }
                    let p2 = self.nodes[z].parent;
                    let gp2 = self.nodes[p2].parent;
                    let mut changed = self.set_color(p2, Color::Black);
                    changed |= self.set_color(gp2, Color::Red);
                    self.note_recolor(changed);
                    self.rotate_left(gp2);
                }
            }
        }
        let rooted = self.set_color(self.root, Color::Black);
        self.note_recolor(rooted);
    }

    #[inline]
    fn compensate_before_left_rotation(&mut self, z: usize, comp: Option<(usize, i64)>) {
        // Block deletion: the retained successor and the nodes still to be
        // deleted sit, notionally, where the rotation is about to move real
        // subtrees. When the rotated node is the successor itself, the new
        // parent's left size must not count the doomed nodes.
        if let Some((y, r)) = comp {
            if y == z && !self.faults.skip_delete_compensation {
                #[cfg(feature = "hook-stats")]
                HOOK_LEFT.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                let w = self.nodes[z].right;
                self.nodes[w].left_size -= r;
            }
        }
    }

    #[inline]
    fn compensate_before_right_rotation(&mut self, z: usize, comp: Option<(usize, i64)>) {
        if let Some((y, r)) = comp {
            if y == self.nodes[z].left && !self.faults.skip_delete_compensation {
                #[cfg(feature = "hook-stats")]
                HOOK_RIGHT.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                self.nodes[z].left_size += r;
            }
        }
    }

    /// Restores the red-black properties after a splice left a double-black
    /// deficit at `x` (possibly NIL, in which case `x_parent` names the
    /// parent of the vacated slot). `comp` carries the retained successor
    /// and the number of block nodes still to be deleted; it is checked
    /// before every rotation. At most three rotations.
    pub(crate) fn delete_fixup(
        &mut self,
        mut x: usize,
        mut x_parent: usize,
        comp: Option<(usize, i64)>,
    ) {
        while x != self.root && self.is_black(x) {
            let p = if x != NIL {
                self.nodes[x].parent
            } else {
                x_parent
            };
            if p == NIL {
                break;
            }
            self.counters.fixup_iteration();
            if self.nodes[p].left == x {
                let mut w = self.nodes[p].right;
                if self.is_red(w) {
                    let mut changed = self.set_color(w, Color::Black);
                    changed |= self.set_color(p, Color::Red);
                    self.note_recolor(changed);
                    self.compensate_before_left_rotation(p, comp);
                    self.rotate_left(p);
                    w = self.nodes[p].right;
                }
                let wl = self.nodes[w].left;
                let wr = self.nodes[w].right;
                if self.is_black(wl) && self.is_black(wr) {
                    let changed = self.set_color(w, Color::Red);
                    self.note_recolor(changed);
                    x = p;
                    x_parent = self.nodes[p].parent;
                } else {
                    if self.is_black(wr) {
                        let mut changed = self.set_color(wl, Color::Black);
                        changed |= self.set_color(w, Color::Red);
                        self.note_recolor(changed);
                        self.compensate_before_right_rotation(w, comp);
                        self.rotate_right(w);
                        w = self.nodes[p].right;
                    }
                    let pc = self.nodes[p].color;
                    let mut changed = self.set_color(w, pc);
                    changed |= self.set_color(p, Color::Black);
                    let wr = self.nodes[w].right;
                    changed |= self.set_color(wr, Color::Black);
                    self.note_recolor(changed);
                    self.compensate_before_left_rotation(p, comp);
                    self.rotate_left(p);
                    x = self.root;
                }
            } else {
                let mut w = self.nodes[p].left;
                if self.is_red(w) {
                    let mut changed = self.set_color(w, Color::Black);
                    changed |= self.set_color(p, Color::Red);
                    self.note_recolor(changed);
                    self.compensate_before_right_rotation(p, comp);
                    self.rotate_right(p);
                    w = self.nodes[p].left;
                }
                let wl = self.nodes[w].left;
                let wr = self.nodes[w].right;
                if self.is_black(wl) && self.is_black(wr) {
                    let changed = self.set_color(w, Color::Red);
                    self.note_recolor(changed);
                    x = p;
                    x_parent = self.nodes[p].parent;
                } else {
                    if self.is_black(wl) {
                        let mut changed = self.set_color(wr, Color::Black);
                        changed |= self.set_color(w, Color::Red);
                        self.note_recolor(changed);
                        self.compensate_before_left_rotation(w, comp);
                        self.rotate_left(w);
                        w = self.nodes[p].left;
                    }
                    let pc = self.nodes[p].color;
                    let mut changed = self.set_color(w, pc);
                    changed |= self.set_color(p, Color::Black);
                    let wl = self.nodes[w].left;
                    changed |= self.set_color(wl, Color::Black);
                    self.note_recolor(changed);
                    self.compensate_before_right_rotation(p, comp);
                    self.rotate_right(p);
                    x = self.root;
                }
            }
        }
        if x != NIL {
            let changed = self.set_color(x, Color::Black);
            self.note_recolor(changed);
        }
    }

    // ── descents and walks ──────────────────────────────────────────────

    /// Rank descent, `1 <= k <= count` assumed. Counts one root descent and
    /// one visit per node on the path.
    pub(crate) fn select_raw(&self, k: usize) -> usize {
        self.counters.root_descent();
        let mut cur = self.root;
        let mut kk = k as i64;
        loop {
            self.counters.visit();
            let pos = self.nodes[cur].left_size + 1;
            if kk == pos {
                return cur;
            }
            if kk < pos {
                cur = self.nodes[cur].left;
            } else {
                kk -= pos;
                cur = self.nodes[cur].right;
            }
        }
    }

    /// Rank descent that records the path for a subsequent in-order walk.
    /// After the call the stack holds the target on top, below it every
    /// ancestor whose left subtree contains the target.
    pub(crate) fn descend_to_rank(&self, k: usize, stack: &mut Vec<usize>) {
        self.counters.root_descent();
        let mut cur = self.root;
        let mut kk = k as i64;
        loop {
            self.counters.visit();
            let pos = self.nodes[cur].left_size + 1;
            if kk == pos {
                stack.push(cur);
                return;
            }
            if kk < pos {
                stack.push(cur);
                cur = self.nodes[cur].left;
            } else {
                kk -= pos;
                cur = self.nodes[cur].right;
            }
        }
    }

    /// Advances the walk to the in-order successor of the stack top and
    /// returns it (NIL at the end). Every node is pushed — and therefore
    /// counted as a visit — at most once over an entire walk, so a block
    /// read of `m` elements touches `m + O(height)` distinct nodes.
    pub(crate) fn walk_next(&self, stack: &mut Vec<usize>) -> usize {
        let cur = stack.pop().expect("walk_next on empty walk");
        let mut v = self.nodes[cur].right;
        if v != NIL {
            loop {
                self.counters.visit();
                stack.push(v);
                let l = self.nodes[v].left;
                if l == NIL {
                    break;
                }
                v = l;
            }
        }
        stack.last().copied().unwrap_or(NIL)
    }

    /// Successor located by climbing parent links: the nearest ancestor
    /// whose left subtree contains `x`. NIL when `x` is the maximum.
    pub(crate) fn climb_successor(&self, x: usize) -> usize {
        let mut c = x;
        let mut p = self.nodes[x].parent;
        while p != NIL {
            self.counters.visit();
            if self.nodes[p].left == c {
                return p;
            }
            c = p;
            p = self.nodes[p].parent;
        }
        NIL
    }

    /// Replaces the subtree rooted at `u` with the one rooted at `v` in u's
    /// parent. Does not touch left sizes.
    pub(crate) fn transplant(&mut self, u: usize, v: usize) {
        let up = self.nodes[u].parent;
        if up == NIL {
            self.root = v;
        } else if self.nodes[up].left == u {
            self.nodes[up].left = v;
        } else {
            self.nodes[up].right = v;
        }
        if v != NIL {
            self.nodes[v].parent = up;
        }
    }

    /// In-order visitor: `f(rank, key, payload)` for every element. Bails
    /// out if the link structure would make the walk overrun (corrupt
    /// trees), rather than looping forever.
    pub fn for_each_in_order<F: FnMut(usize, &RankKey, &[u8])>(&self, mut f: F) {
        let mut stack: Vec<usize> = Vec::new();
        let mut cur = self.root;
        let mut rank = 0usize;
        let cap = self.nodes.len() + 1;
        let mut pushes = 0usize;
        while cur != NIL || !stack.is_empty() {
            while cur != NIL {
                pushes += 1;
                if pushes > cap {
                    return;
                }
                stack.push(cur);
                cur = self.nodes[cur].left;
            }
            let v = stack.pop().expect("non-empty stack");
            rank += 1;
            let n = &self.nodes[v];
            f(rank, &n.key, &n.payload);
            cur = n.right;
        }
    }

    /// Payload bytes in rank order.
    pub fn payloads_in_order(&self) -> Vec<Vec<u8>> {
        let mut out = Vec::with_capacity(self.count);
        self.for_each_in_order(|_, _, p| out.push(p.to_vec()));
        out
    }

    /// Keys in rank order.
    pub fn keys_in_order(&self) -> Vec<RankKey> {
        let mut out = Vec::with_capacity(self.count);
        self.for_each_in_order(|_, k, _| out.push(k.clone()));
        out
    }

    /// Reassigns integer keys `1..=len` in rank order. Maintenance valve for
    /// callers worried about denominator growth after heavy mid-sequence
    /// insertion; never invoked implicitly. Shape, colors and left sizes are
    /// untouched.
    pub fn rebuild_keys(&mut self) {
        let mut stack: Vec<usize> = Vec::new();
        let mut cur = self.root;
        let mut i: i64 = 0;
        while cur != NIL || !stack.is_empty() {
            while cur != NIL {
                stack.push(cur);
                cur = self.nodes[cur].left;
            }
            let v = stack.pop().expect("non-empty stack");
            i += 1;
            self.nodes[v].key = RankKey::integer(i);
            cur = self.nodes[v].right;
        }
    }
}
