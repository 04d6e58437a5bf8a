//! Structural validation: recomputes every invariant from scratch and
//! reports violations as data. Used after every step of the differential
//! fuzz campaigns, so it is iterative, allocation-light on the clean path,
//! and survives corrupt link structures (cycles are detected by a visit
//! budget instead of recursing forever).

use std::fmt;

use crate::key::RankKey;
use crate::tree::{Color, WiseTree, NIL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    RootNotBlack,
    RedRedEdge,
    BlackHeightMismatch,
    BstOrderViolation,
    LeftSizeMismatch,
    StaleMaxNode,
    StaleCount,
    ParentLinkMismatch,
    CycleSuspected,
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub kind: ViolationKind,
    /// In-order rank of the offending node, when one can be named.
    pub node_rank: Option<usize>,
    pub detail: String,
}

/// Outcome of [`WiseTree::validate_structure`]. Empty iff the tree passes
/// every structural check.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: ViolationKind, node_rank: Option<usize>, detail: String) {
        self.violations.push(Violation {
            kind,
            node_rank,
            detail,
        });
    }
}

/// Everything the combined deep pass establishes in one sweep.
pub(crate) struct DeepCheck {
    pub(crate) report: ValidationReport,
    /// Nodes on the longest root-to-leaf path (0 for an empty tree).
    pub(crate) max_depth: usize,
    /// Whether every one-child node has a red, childless child.
    pub(crate) one_child_ok: bool,
    /// Rank of the first element differing from the mirror, when one was
    /// supplied.
    pub(crate) mismatch_rank: Option<usize>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return write!(f, "clean");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            match v.node_rank {
                Some(r) => write!(f, "{:?} at rank {}: {}", v.kind, r, v.detail)?,
                None => write!(f, "{:?}: {}", v.kind, v.detail)?,
            }
        }
        Ok(())
    }
}

impl WiseTree {
    /// Recomputes and checks every structural invariant: root color, red-red
    /// edges, black-height balance, in-order key order, every `left_size`
    /// field against the recounted left-subtree size, the cached maximum and
    /// the cached element count. Pure read; violations come back as data.
    pub fn validate_structure(&self) -> ValidationReport {
        self.deep_check(None).report
    }

    /// The combined deep pass behind
    /// [`validate_structure`](WiseTree::validate_structure), the one-child
    /// shape check and the mirror comparison. The differential runner calls
    /// this once per operation, so everything is computed in two linear
    /// passes: an in-order walk (whose push order is preorder) checks links,
    /// colors, key order, depth and the mirror under a visit budget; a
    /// reverse-preorder sweep then recomputes subtree sizes and black
    /// heights bottom-up. Offending nodes are named by in-order rank on the
    /// (rare) slow path.
    pub(crate) fn deep_check(&self, mirror: Option<&[(RankKey, Vec<u8>)]>) -> DeepCheck {
        let mut out = DeepCheck {
            report: ValidationReport::default(),
            max_depth: 0,
            one_child_ok: true,
            mismatch_rank: None,
        };
        let root = self.root_idx();
        if root == NIL {
            if !self.is_empty() {
                out.report.push(
                    ViolationKind::StaleCount,
                    None,
                    format!("empty tree but count is {}", self.len()),
                );
            }
            if self.max_idx() != NIL {
                out.report.push(
                    ViolationKind::StaleMaxNode,
                    None,
                    "empty tree but maxNode is set".to_string(),
                );
            }
            if let Some(entries) = mirror {
                if !entries.is_empty() {
                    out.mismatch_rank = Some(1);
                }
            }
            return out;
        }

        if self.node(root).color != Color::Black {
            out.report
                .push(ViolationKind::RootNotBlack, None, "root is red".to_string());
        }
        if self.node(root).parent != NIL {
            out.report.push(
                ViolationKind::ParentLinkMismatch,
                None,
                "root has a parent link".to_string(),
            );
        }

        // In-order walk; the budget caps total pushes so cycles terminate.
        let budget = 2 * self.len() + 1;
        let mut pushes = 0usize;
        let mut stack: Vec<(usize, u32)> = Vec::with_capacity(64);
        let mut preorder: Vec<u32> = Vec::with_capacity(self.len());
        let mut rank_of: Vec<(u32, u32)> = Vec::with_capacity(self.len());
        let mut prev: usize = NIL;
        let mut rank = 0usize;
        let mut cur = root;
        let mut cur_depth: u32 = 1;
        'walk: loop {
            while cur != NIL {
                pushes += 1;
                if pushes > budget {
                    out.report.push(
                        ViolationKind::CycleSuspected,
                        None,
                        format!("traversal exceeded {budget} node visits"),
                    );
                    return out;
                }
                // Preorder point: link, color and one-child checks.
                let n = self.node(cur);
                let (l, r) = (n.left, n.right);
                if l != NIL && self.node(l).parent != cur {
                    out.report.push(
                        ViolationKind::ParentLinkMismatch,
                        None,
                        format!("left child of slot {cur} does not point back"),
                    );
                }
                if r != NIL && self.node(r).parent != cur {
                    out.report.push(
                        ViolationKind::ParentLinkMismatch,
                        None,
                        format!("right child of slot {cur} does not point back"),
                    );
                }
                if n.color == Color::Red && (self.is_red(l) || self.is_red(r)) {
                    out.report.push(
                        ViolationKind::RedRedEdge,
                        None,
                        format!("red node in slot {cur} has a red child"),
                    );
                }
                if (l == NIL) != (r == NIL) {
                    let c = if l != NIL { l } else { r };
                    let cn = self.node(c);
                    if cn.color != Color::Red || cn.left != NIL || cn.right != NIL {
                        out.one_child_ok = false;
                    }
                }
                out.max_depth = out.max_depth.max(cur_depth as usize);
                preorder.push(cur as u32);
                stack.push((cur, cur_depth));
                cur = l;
                cur_depth += 1;
            }
            let Some((v, d)) = stack.pop() else {
                break 'walk;
            };
            // In-order point: key order and the mirror comparison.
            rank += 1;
            let vn = self.node(v);
            if prev != NIL && self.node(prev).key >= vn.key {
                out.report.push(
                    ViolationKind::BstOrderViolation,
                    Some(rank),
                    format!(
                        "key {} does not exceed its predecessor {}",
                        vn.key,
                        self.node(prev).key
                    ),
                );
            }
            if let Some(entries) = mirror {
                if out.mismatch_rank.is_none() {
                    match entries.get(rank - 1) {
                        Some((key, payload)) if *key == vn.key && *payload == vn.payload => {}
                        _ => out.mismatch_rank = Some(rank),
                    }
                }
            }
            rank_of.push((v as u32, rank as u32));
            prev = v;
            cur = vn.right;
            cur_depth = d + 1;
        }
        if let Some(entries) = mirror {
            if out.mismatch_rank.is_none() && entries.len() > rank {
                out.mismatch_rank = Some(rank + 1);
            }
        }

        // Reverse preorder visits children before parents: recompute sizes
        // and black heights bottom-up.
        let slots = self.arena_len();
        let mut sizes = vec![0i64; slots];
        let mut heights = vec![0u32; slots];
        let mut size_bad: Vec<u32> = Vec::new();
        let mut bh_bad: Vec<u32> = Vec::new();
        for &v32 in preorder.iter().rev() {
            let v = v32 as usize;
            let n = self.node(v);
            let (ls, lbh) = if n.left == NIL {
                (0, 1)
            } else {
                (sizes[n.left], heights[n.left])
            };
            let (rs, rbh) = if n.right == NIL {
                (0, 1)
            } else {
                (sizes[n.right], heights[n.right])
            };
            if n.left_size != ls {
                size_bad.push(v32);
            }
            if lbh != rbh {
                bh_bad.push(v32);
            }
            sizes[v] = ls + rs + 1;
            heights[v] = lbh.min(rbh) + u32::from(n.color == Color::Black);
        }
        if !size_bad.is_empty() || !bh_bad.is_empty() {
            let rank_lookup = |slot: u32| {
                rank_of
                    .iter()
                    .find(|(s, _)| *s == slot)
                    .map(|(_, r)| *r as usize)
            };
            for v32 in size_bad {
                let v = v32 as usize;
                let n = self.node(v);
                let actual = if n.left == NIL { 0 } else { sizes[n.left] };
                out.report.push(
                    ViolationKind::LeftSizeMismatch,
                    rank_lookup(v32),
                    format!(
                        "leftSize field is {}, left subtree holds {}",
                        n.left_size, actual
                    ),
                );
            }
            for v32 in bh_bad {
                let v = v32 as usize;
                let n = self.node(v);
                let lbh = if n.left == NIL { 1 } else { heights[n.left] };
                let rbh = if n.right == NIL { 1 } else { heights[n.right] };
                out.report.push(
                    ViolationKind::BlackHeightMismatch,
                    rank_lookup(v32),
                    format!("black heights {lbh} (left) vs {rbh} (right)"),
                );
            }
        }

        if sizes[root] != self.len() as i64 {
            out.report.push(
                ViolationKind::StaleCount,
                None,
                format!("count is {}, tree holds {} nodes", self.len(), sizes[root]),
            );
        }

        // The cached maximum must be the rightmost node.
        let mut v = root;
        let mut steps = 0usize;
        while self.node(v).right != NIL {
            v = self.node(v).right;
            steps += 1;
            if steps > budget {
                out.report.push(
                    ViolationKind::CycleSuspected,
                    None,
                    "right spine walk exceeded the visit budget".to_string(),
                );
                return out;
            }
        }
        if v != self.max_idx() {
            out.report.push(
                ViolationKind::StaleMaxNode,
                None,
                "maxNode is not the rightmost node".to_string(),
            );
        }

        out
    }

    /// Checks that every node with exactly one real child has a red,
    /// childless child (a subtree of size one). Holds for every valid
    /// red-black shape; `false` means the shape (or this walk) is broken.
    pub fn single_child_is_red_leaf(&self) -> bool {
        let root = self.root_idx();
        if root == NIL {
            return true;
        }
        let budget = 2 * self.len() + 1;
        let mut visits = 0usize;
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            visits += 1;
            if visits > budget {
                return false;
            }
            let l = self.node(n).left;
            let r = self.node(n).right;
            if (l == NIL) != (r == NIL) {
                let c = if l != NIL { l } else { r };
                let cn = self.node(c);
                if cn.color != Color::Red || cn.left != NIL || cn.right != NIL {
                    return false;
                }
            }
            if l != NIL {
                stack.push(l);
            }
            if r != NIL {
                stack.push(r);
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::tree_of;

    #[test]
    fn empty_tree_is_clean() {
        let t = WiseTree::new();
        assert!(t.validate_structure().is_clean());
        assert!(t.single_child_is_red_leaf());
    }

    #[test]
    fn built_trees_are_clean() {
        let t = tree_of(&["A", "B", "C", "D", "E", "F", "G", "H", "I"]);
        assert!(t.validate_structure().is_clean());
    }

    #[test]
    fn left_size_off_by_one_is_reported_exactly_once() {
        let mut t = tree_of(&["A", "B", "C", "D", "E", "F", "G"]);
        let root = t.root_idx();
        let root_rank = t.node(root).left_size as usize + 1;
        t.node_mut(root).left_size += 1;
        let report = t.validate_structure();
        let hits: Vec<&Violation> = report
            .violations
            .iter()
            .filter(|v| v.kind == ViolationKind::LeftSizeMismatch)
            .collect();
        assert_eq!(hits.len(), 1, "{report}");
        assert_eq!(hits[0].node_rank, Some(root_rank));
        assert!(hits[0].detail.contains("leftSize"));
    }

    #[test]
    fn red_root_is_reported() {
        let mut t = tree_of(&["A"]);
        let root = t.root_idx();
        t.node_mut(root).color = Color::Red;
        let report = t.validate_structure();
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::RootNotBlack));
    }

    #[test]
    fn red_red_edge_is_reported() {
        // Painting everything red guarantees at least one red-red edge.
        let mut t = tree_of(&["A", "B", "C", "D", "E"]);
        for rank in 1..=5 {
            let idx = t.kth_smallest(rank).unwrap().0;
            t.node_mut(idx).color = Color::Red;
        }
        let report = t.validate_structure();
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::RedRedEdge));
    }

    #[test]
    fn black_height_mismatch_is_reported() {
        let mut t = tree_of(&["A", "B", "C"]);
        // Blacken one red leaf: paths now disagree.
        let leaf = t.kth_smallest(1).unwrap().0;
        if t.node(leaf).color == Color::Red {
            t.node_mut(leaf).color = Color::Black;
        } else {
            let other = t.kth_smallest(3).unwrap().0;
            t.node_mut(other).color = Color::Black;
        }
        let report = t.validate_structure();
        assert!(
            report
                .violations
                .iter()
                .any(|v| v.kind == ViolationKind::BlackHeightMismatch),
            "{report}"
        );
    }

    #[test]
    fn bst_order_violation_is_reported() {
        let mut t = tree_of(&["A", "B", "C"]);
        let first = t.kth_smallest(1).unwrap().0;
        let last = t.kth_smallest(3).unwrap().0;
        let big = t.node(last).key.clone();
        let small = t.node(first).key.clone();
        t.node_mut(first).key = big;
        t.node_mut(last).key = small;
        let report = t.validate_structure();
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::BstOrderViolation));
    }

    #[test]
    fn stale_caches_are_reported() {
        let mut t = tree_of(&["A", "B", "C"]);
        t.set_count(5);
        let report = t.validate_structure();
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::StaleCount));

        let mut t = tree_of(&["A", "B", "C"]);
        let root = t.root_idx();
        t.set_max_idx(root);
        let report = t.validate_structure();
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::StaleMaxNode));
    }

    #[test]
    fn cycles_are_detected_not_looped() {
        let mut t = tree_of(&["A", "B", "C"]);
        let root = t.root_idx();
        // Point a leaf's child back at the root.
        let leaf = t.node(root).left;
        t.node_mut(leaf).left = root;
        let report = t.validate_structure();
        assert!(
            report.violations.iter().any(|v| matches!(
                v.kind,
                ViolationKind::CycleSuspected | ViolationKind::ParentLinkMismatch
            )),
            "{report}"
        );
    }

    #[test]
    fn one_child_check_spots_a_deep_single_child() {
        // Hand-corrupt a tree so some node has exactly one child whose own
        // child has children: cut the root's left subtree. The root then
        // keeps only its right child, which is an interior node.
        let mut t = tree_of(&["A", "B", "C", "D", "E", "F", "G"]);
        assert!(t.single_child_is_red_leaf());
        let root = t.root_idx();
        let right = t.node(root).right;
        assert!(t.node(right).left != NIL || t.node(right).right != NIL);
        t.node_mut(root).left = NIL;
        assert!(!t.single_child_is_red_leaf());
    }
}
