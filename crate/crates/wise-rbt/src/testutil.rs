//! Shared helpers for the in-crate unit tests.

use crate::tree::{WiseTree, NIL};

/// Tree holding the single-letter payloads, built by one append.
pub(crate) fn tree_of(tokens: &[&str]) -> WiseTree {
    let mut t = WiseTree::new();
    if !tokens.is_empty() {
        t.block_append(tokens.iter().map(|s| s.as_bytes().to_vec()).collect())
            .expect("append");
    }
    t
}

pub(crate) fn payload_strings(t: &WiseTree) -> Vec<String> {
    t.payloads_in_order()
        .iter()
        .map(|p| String::from_utf8_lossy(p).into_owned())
        .collect()
}

/// Independent traversal oracle: walks raw child links recursively, never
/// touching left sizes, the walker or the counters.
pub(crate) fn in_order_payloads_by_links(t: &WiseTree) -> Vec<Vec<u8>> {
    fn rec(t: &WiseTree, i: usize, out: &mut Vec<Vec<u8>>) {
        if i == NIL {
            return;
        }
        rec(t, t.node(i).left, out);
        out.push(t.node(i).payload.clone());
        rec(t, t.node(i).right, out);
    }
    let mut out = Vec::new();
    rec(t, t.root_idx(), &mut out);
    out
}

/// In-order structural snapshot: (key, is-red, left_size, depth) per node.
/// In-order position plus depth pins the shape exactly, so equal snapshots
/// mean identical trees.
pub(crate) fn shape_snapshot(t: &WiseTree) -> Vec<(String, bool, i64, usize)> {
    fn rec(t: &WiseTree, i: usize, depth: usize, out: &mut Vec<(String, bool, i64, usize)>) {
        if i == NIL {
            return;
        }
        let n = t.node(i);
        rec(t, n.left, depth + 1, out);
        out.push((n.key.to_string(), t.is_red(i), n.left_size, depth));
        rec(t, n.right, depth + 1, out);
    }
    let mut out = Vec::new();
    rec(t, t.root_idx(), 0, &mut out);
    out
}

/// All structural invariants at once; panics with the report on failure.
pub(crate) fn assert_valid(t: &WiseTree) {
    let report = t.validate_structure();
    assert!(report.is_clean(), "structural violations: {report}");
    assert!(
        t.single_child_is_red_leaf(),
        "one-child shape property broken"
    );
}
