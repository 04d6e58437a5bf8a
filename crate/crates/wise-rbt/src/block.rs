//! Block operations: get, set, append, insert, reinsert and delete of `m`
//! consecutive elements addressed by the rank `k` of the first one.
//!
//! The cost model these implement:
//! * get/set — one rank descent plus an in-order walk, never re-descending;
//! * append — no search at all: each node is attached to the right of the
//!   tracked maximum with key `max+1`;
//! * insert — one rank descent for the first node (adding `m` to the left
//!   size of every node it turns left at), then each follow-up node is
//!   placed in constant time next to the previous one;
//! * delete — one rank descent (subtracting `m` on left turns), then each
//!   target's in-order successor both names the next target and drives the
//!   left-size compensation.

use crate::error::{check_block_range, TreeError};
use crate::key::{synth_keys, RankKey};
use crate::tree::{Color, WiseTree, NIL};

impl WiseTree {
    /// Payloads at ranks `k ..= k+m-1`, in order. One rank descent followed
    /// by `m-1` successor steps.
    pub fn block_get(&self, k: usize, m: usize) -> Result<Vec<Vec<u8>>, TreeError> {
        check_block_range(k, m, self.len())?;
        if m == 0 {
            return Ok(Vec::new());
        }
        let mut stack = Vec::with_capacity(64);
        self.descend_to_rank(k, &mut stack);
        let mut out = Vec::with_capacity(m);
        let mut cur = *stack.last().expect("descent lands on a node");
        out.push(self.node(cur).payload.clone());
        for _ in 1..m {
            cur = self.walk_next(&mut stack);
            out.push(self.node(cur).payload.clone());
        }
        Ok(out)
    }

    /// Replaces the payloads at ranks `k ..= k+m-1` in order. Keys, shape,
    /// colors and left sizes are untouched.
    pub fn block_set(&mut self, k: usize, values: Vec<Vec<u8>>) -> Result<(), TreeError> {
        let m = values.len();
        if m == 0 {
            return Err(TreeError::EmptyBlock {
                k,
                m: 0,
                count: self.len(),
            });
        }
        check_block_range(k, m, self.len())?;
        let mut stack = Vec::with_capacity(64);
        self.descend_to_rank(k, &mut stack);
        let mut cur = *stack.last().expect("descent lands on a node");
        for (i, v) in values.into_iter().enumerate() {
            if i > 0 {
                cur = self.walk_next(&mut stack);
            }
            self.node_mut(cur).payload = v;
        }
        Ok(())
    }

    /// Appends the values at the tail of the sequence. Per element: attach
    /// to the right of the current maximum with key `max+1` (key `1` into an
    /// empty tree), fix up, advance the maximum. No descent, no key
    /// comparison.
    pub fn block_append(&mut self, values: Vec<Vec<u8>>) -> Result<(), TreeError> {
        if values.is_empty() {
            return Err(TreeError::EmptyBlock {
                k: self.len() + 1,
                m: 0,
                count: self.len(),
            });
        }
        self.append_values(values);
        Ok(())
    }

    fn append_values(&mut self, values: Vec<Vec<u8>>) {
        for payload in values {
            let mx = self.max_idx();
            let idx = if mx == NIL {
                debug_assert!(self.root_idx() == NIL);
                let idx = self.alloc(RankKey::integer(1), payload, Color::Red);
                self.force_root(idx);
                idx
            } else {
                debug_assert!(self.node(mx).right == NIL);
                let key = self.node(mx).key.offset(1);
                let idx = self.alloc(key, payload, Color::Red);
                self.node_mut(idx).parent = mx;
                self.node_mut(mx).right = idx;
                idx
            };
            self.set_count(self.len() + 1);
            self.insert_fixup(idx);
            self.set_max_idx(idx);
        }
    }

    /// Inserts the values so they occupy ranks `k ..= k+m-1`; prior
    /// occupants of ranks `>= k` shift up by `m`. `k = len+1` appends.
    pub fn block_insert(&mut self, k: usize, values: Vec<Vec<u8>>) -> Result<(), TreeError> {
        let m = values.len();
        if m == 0 {
            return Err(TreeError::EmptyBlock {
                k,
                m: 0,
                count: self.len(),
            });
        }
        if k == 0 || k > self.len() + 1 {
            return Err(TreeError::RankOutOfRange {
                k,
                m,
                count: self.len(),
            });
        }
        if k == self.len() + 1 {
            self.append_values(values);
            return Ok(());
        }
        self.insert_descent(k, values);
        Ok(())
    }

    /// Like [`block_insert`](WiseTree::block_insert) but always takes the
    /// rank-descent path, even at the tail. This is the per-element baseline
    /// path: driving it with one value at a time costs one root descent per
    /// element. The resulting sequence and keys are identical to
    /// `block_insert` of the same arguments.
    pub fn block_insert_by_descent(
        &mut self,
        k: usize,
        values: Vec<Vec<u8>>,
    ) -> Result<(), TreeError> {
        let m = values.len();
        if m == 0 {
            return Err(TreeError::EmptyBlock {
                k,
                m: 0,
                count: self.len(),
            });
        }
        if k == 0 || k > self.len() + 1 {
            return Err(TreeError::RankOutOfRange {
                k,
                m,
                count: self.len(),
            });
        }
        self.insert_descent(k, values);
        Ok(())
    }

    fn insert_descent(&mut self, k: usize, values: Vec<Vec<u8>>) {
        let m = values.len();
        let grow = m as i64;
        let skip_preincrement = self.faults.skip_insert_preincrement;

        // Single rank descent to the gap between ranks k-1 and k, tracking
        // the in-order neighbors for key synthesis. Every node the descent
        // leaves to the left will end up with the whole block in its left
        // subtree, so its left size grows by m up front; the rotations of
        // the per-node fixups keep the fields consistent from there.
        self.counters.root_descent();
        let mut cur = self.root_idx();
        let mut kk = k as i64;
        let mut parent = NIL;
        let mut attach_left = false;
        let mut pred = NIL;
        let mut succ = NIL;
        while cur != NIL {
            self.counters.visit();
            let pos = self.node(cur).left_size + 1;
            if kk <= pos {
                if !skip_preincrement {
                    self.node_mut(cur).left_size += grow;
                }
                succ = cur;
                parent = cur;
                attach_left = true;
                cur = self.node(cur).left;
            } else {
                kk -= pos;
                pred = cur;
                parent = cur;
                attach_left = false;
                cur = self.node(cur).right;
            }
        }

        let pred_key = (pred != NIL).then(|| self.node(pred).key.clone());
        let succ_key = (succ != NIL).then(|| self.node(succ).key.clone());
        let keys = synth_keys(pred_key.as_ref(), succ_key.as_ref(), m)
            .expect("in-order neighbor keys are strictly ordered");

        let mut prev = NIL;
        for (key, payload) in keys.into_iter().zip(values) {
            let idx = self.alloc(key, payload, Color::Red);
            if prev == NIL {
                // First node lands in the slot the descent reached.
                self.node_mut(idx).parent = parent;
                if parent == NIL {
                    self.force_root(idx);
                } else if attach_left {
                    self.node_mut(parent).left = idx;
                } else {
                    self.node_mut(parent).right = idx;
                }
            } else {
                // Follow-up nodes go right next to the previous one; no
                // descent.
                let (p, left_side) = self.successor_slot(prev);
                self.node_mut(idx).parent = p;
                if left_side {
                    self.node_mut(p).left = idx;
                } else {
                    self.node_mut(p).right = idx;
                }
            }
            self.set_count(self.len() + 1);
            self.insert_fixup(idx);
            prev = idx;
        }
        if succ == NIL {
            self.set_max_idx(prev);
        }
    }

    /// The attachment slot for the in-order successor of the just-inserted
    /// node `x`: `(x, right)` when x has no right child, otherwise
    /// `(x.right, left)`. A fixup can only have given x a right child whose
    /// left slot is empty; anything else would corrupt the block, so the
    /// check aborts loudly instead of falling back to a descent.
    pub(crate) fn successor_slot(&self, x: usize) -> (usize, bool) {
        let r = self.node(x).right;
        if r == NIL {
            (x, false)
        } else {
            assert!(
                self.node(r).left == NIL,
                "block insertion placement violated: previous node gained a right \
                 child with an occupied left slot"
            );
            (r, true)
        }
    }

    /// Reinserts elements that carry their own keys (typically the result of
    /// an earlier [`block_delete`](WiseTree::block_delete), to undo it). The
    /// keys must be strictly increasing and must fit strictly between the
    /// keys adjacent to where they land; otherwise nothing is modified and
    /// `InvariantViolation` is returned.
    pub fn block_reinsert(&mut self, entries: Vec<(RankKey, Vec<u8>)>) -> Result<(), TreeError> {
        let m = entries.len();
        if m == 0 {
            return Err(TreeError::EmptyBlock {
                k: 0,
                m: 0,
                count: self.len(),
            });
        }
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(TreeError::InvariantViolation {
                    k: 0,
                    m,
                    count: self.len(),
                });
            }
        }

        // Read-only probe: locate the gap for the first key and check the
        // whole block fits, before any field is touched.
        self.counters.root_descent();
        let first_key = &entries[0].0;
        let mut cur = self.root_idx();
        let mut succ = NIL;
        let mut landing_rank: usize = 1;
        while cur != NIL {
            self.counters.visit();
            self.counters.comparison();
            match first_key.cmp(&self.node(cur).key) {
                std::cmp::Ordering::Less => {
                    succ = cur;
                    cur = self.node(cur).left;
                }
                std::cmp::Ordering::Greater => {
                    landing_rank += (self.node(cur).left_size + 1) as usize;
                    cur = self.node(cur).right;
                }
                std::cmp::Ordering::Equal => {
                    return Err(TreeError::InvariantViolation {
                        k: landing_rank,
                        m,
                        count: self.len(),
                    });
                }
            }
        }
        if succ != NIL && !(entries[m - 1].0 < self.node(succ).key) {
            return Err(TreeError::InvariantViolation {
                k: landing_rank,
                m,
                count: self.len(),
            });
        }

        // Adjusting descent, then the same chain placement as block_insert.
        let skip_preincrement = self.faults.skip_insert_preincrement;
        self.counters.root_descent();
        let mut cur = self.root_idx();
        let mut parent = NIL;
        let mut attach_left = false;
        while cur != NIL {
            self.counters.visit();
            self.counters.comparison();
            if *first_key < self.node(cur).key {
                if !skip_preincrement {
                    self.node_mut(cur).left_size += m as i64;
                }
                parent = cur;
                attach_left = true;
                cur = self.node(cur).left;
            } else {
                parent = cur;
                attach_left = false;
                cur = self.node(cur).right;
            }
        }

        let mut prev = NIL;
        for (key, payload) in entries {
            let idx = self.alloc(key, payload, Color::Red);
            if prev == NIL {
                self.node_mut(idx).parent = parent;
                if parent == NIL {
                    self.force_root(idx);
                } else if attach_left {
                    self.node_mut(parent).left = idx;
                } else {
                    self.node_mut(parent).right = idx;
                }
            } else {
                let (p, left_side) = self.successor_slot(prev);
                self.node_mut(idx).parent = p;
                if left_side {
                    self.node_mut(p).left = idx;
                } else {
                    self.node_mut(p).right = idx;
                }
            }
            self.set_count(self.len() + 1);
            self.insert_fixup(idx);
            prev = idx;
        }
        if succ == NIL {
            self.set_max_idx(prev);
        }
        Ok(())
    }

    /// Deletes the elements at ranks `k ..= k+m-1` and returns them (key and
    /// payload) in rank order. Surviving keys are never changed.
    pub fn block_delete(
        &mut self,
        k: usize,
        m: usize,
    ) -> Result<Vec<(RankKey, Vec<u8>)>, TreeError> {
        check_block_range(k, m, self.len())?;
        if m == 0 {
            return Ok(Vec::new());
        }
        let count = self.len();
        let max_deleted = k + m - 1 == count;

        // Rank descent to the first target. Every node the descent leaves to
        // the left loses the whole block from its left subtree, so its left
        // size drops by m up front (transiently below the real count; the
        // per-target compensation below settles each step).
        self.counters.root_descent();
        let shrink = m as i64;
        let mut cur = self.root_idx();
        let mut kk = k as i64;
        loop {
            self.counters.visit();
            let pos = self.node(cur).left_size + 1;
            if kk == pos {
                break;
            }
            if kk < pos {
                self.node_mut(cur).left_size -= shrink;
                cur = self.node(cur).left;
            } else {
                kk -= pos;
                cur = self.node(cur).right;
            }
        }

        let mut removed = Vec::with_capacity(m);
        let mut target = cur;
        for i in 1..=m {
            let remaining = (m - i) as i64;
            let t = target;
            let t_left = self.node(t).left;
            let t_right = self.node(t).right;

            let mut next_target = NIL;
            let mut splice_succ = NIL;
            if t_right != NIL {
                // Successor is the minimum of the right subtree. With two
                // children that successor will be lifted into t's place, so
                // every node passed on the way down (successor excluded)
                // loses one node from its left subtree.
                let two_children = t_left != NIL;
                let mut v = t_right;
                self.counters.visit();
                loop {
                    let l = self.node(v).left;
                    if l == NIL {
                        break;
                    }
                    if two_children {
                        self.node_mut(v).left_size -= 1;
                    }
                    v = l;
                    self.counters.visit();
                }
                splice_succ = v;
                if remaining > 0 {
                    next_target = v;
                }
            } else if remaining > 0 {
                // Successor sits above: the deepest ancestor whose left
                // subtree holds t. Its left size was pre-decremented by the
                // full m, but the nodes still to be deleted are not in its
                // left subtree, so add them back.
                let y = self.climb_successor(t);
                debug_assert!(y != NIL, "non-final block node must have a successor");
                self.node_mut(y).left_size += remaining;
                next_target = y;
            }

            let comp = (remaining > 0).then_some((next_target, remaining));
            removed.push(self.delete_node(t, splice_succ, comp));
            target = next_target;
        }

        self.set_count(count - m);
        if self.is_empty() {
            self.set_max_idx(NIL);
        } else if max_deleted {
            // The old maximum was in the block; re-resolve it.
            let mut v = self.root_idx();
            self.counters.visit();
            while self.node(v).right != NIL {
                v = self.node(v).right;
                self.counters.visit();
            }
            self.set_max_idx(v);
        }
        Ok(removed)
    }

    /// Unlinks `z`, splicing `splice_succ` (the minimum of z's right
    /// subtree, required when z has two children) into its place. The
    /// spliced node adopts the slot's structural fields — parent, children,
    /// color and left size — while keeping its own key and payload. Runs the
    /// delete fixup with `comp` when the vacated slot was black.
    fn delete_node(
        &mut self,
        z: usize,
        splice_succ: usize,
        comp: Option<(usize, i64)>,
    ) -> (RankKey, Vec<u8>) {
        let z_left = self.node(z).left;
        let z_right = self.node(z).right;
        let removed_color;
        let x;
        let x_parent;
        if z_left == NIL {
            removed_color = self.node(z).color;
            x = z_right;
            x_parent = self.node(z).parent;
            self.transplant(z, z_right);
        } else if z_right == NIL {
            removed_color = self.node(z).color;
            x = z_left;
            x_parent = self.node(z).parent;
            self.transplant(z, z_left);
        } else {
            let y = splice_succ;
            debug_assert!(y != NIL && self.node(y).left == NIL);
            removed_color = self.node(y).color;
            x = self.node(y).right;
            if self.node(y).parent == z {
                x_parent = y;
            } else {
                x_parent = self.node(y).parent;
                self.transplant(y, x);
                let zr = self.node(z).right;
                self.node_mut(y).right = zr;
                self.node_mut(zr).parent = y;
            }
            self.transplant(z, y);
            self.node_mut(y).left = z_left;
            self.node_mut(z_left).parent = y;
            let slot_color = self.node(z).color;
            let slot_left_size = self.node(z).left_size;
            let yn = self.node_mut(y);
            yn.color = slot_color;
            yn.left_size = slot_left_size;
        }

        let zn = self.node_mut(z);
        let key = std::mem::replace(&mut zn.key, RankKey::integer(0));
        let payload = std::mem::take(&mut zn.payload);
        self.free_node(z);

        if removed_color == Color::Black {
            self.delete_fixup(x, x_parent, comp);
        }
        (key, payload)
    }
}
