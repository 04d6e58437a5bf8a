//! Instrumentation probe: how often each side of the delete-compensation
//! rule fires across healthy campaigns. Build with `--features hook-stats`.
//!
//! Observed: the left-rotation condition fires constantly; the
//! right-rotation condition never does, because the successor-splice delete
//! keeps the retained successor an ancestor-or-self of the double-black
//! path. The right-side rule stays implemented for contract completeness.

use wise_rbt::fuzz::{random_valid_op, SplitMix64};
use wise_rbt::{apply_to_tree, OpWeights, OracleSeq, WiseTree, WorkloadOp};

fn main() {
    let weights = OpWeights::default();
    let mut deletes = 0u64;
    for seed in 0..40u64 {
        let mut rng = SplitMix64::new(seed);
        let mut tree = WiseTree::new();
        let mut oracle = OracleSeq::new();
        for _ in 0..20_000 {
            let op = random_valid_op(&mut rng, oracle.len(), 32, &weights, 10_000);
            if matches!(op, WorkloadOp::Delete { .. }) {
                deletes += 1;
            }
            apply_to_tree(&mut tree, &op).unwrap();
            oracle.apply(&op).unwrap();
        }
        assert!(tree.validate_structure().is_clean());
    }
    #[cfg(feature = "hook-stats")]
    println!(
        "deletes {deletes}: compensation fired on left rotations {} times, right {}",
        wise_rbt::tree::HOOK_LEFT.load(std::sync::atomic::Ordering::Relaxed),
        wise_rbt::tree::HOOK_RIGHT.load(std::sync::atomic::Ordering::Relaxed)
    );
    #[cfg(not(feature = "hook-stats"))]
    println!("deletes {deletes} (rebuild with --features hook-stats for the split)");
}
