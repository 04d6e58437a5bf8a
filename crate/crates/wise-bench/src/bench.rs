//! Counter benchmark: runs a named workload for every (structure, n, m)
//! cell and prints one CSV row per repeat. Counter columns are exact and
//! deterministic (the per-cell RNG is seeded from the cell itself);
//! wallNanos is whatever the clock says.

use std::time::Instant;

use wise_rbt::{CostCounters, OpWeights, SplitMix64, WorkloadOp};

use crate::run::Runner;
use crate::StructureKind;

pub const CSV_HEADER: &str =
    "structure,workload,n,m,wallNanos,nodeVisits,rotations,recolorings,comparisons";

const STRUCTURES: [(StructureKind, &str); 3] = [
    (StructureKind::Wise, "wise"),
    (StructureKind::Naive, "naive"),
    (StructureKind::Array, "array"),
];

fn fixed_token(i: usize) -> Vec<u8> {
    // Fixed-width 8-byte payloads keep allocator effects uniform across
    // structures.
    format!("{:08}", i % 100_000_000).into_bytes()
}

fn cell_seed(workload: &str, n: usize, m: usize, rep: usize) -> u64 {
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for b in workload.bytes() {
        h = h.wrapping_mul(0x100_0000_01B3).wrapping_add(b as u64);
    }
    h ^ (n as u64).rotate_left(17) ^ (m as u64).rotate_left(34) ^ (rep as u64)
}

/// The measured phase of one cell: a setup size plus the op list to time.
struct CellPlan {
    setup: usize,
    ops: Vec<WorkloadOp>,
}

fn plan_cell(workload: &str, n: usize, m: usize, rep: usize) -> CellPlan {
    let mut rng = SplitMix64::new(cell_seed(workload, n, m, rep));
    match workload {
        "append-blocks" => {
            let mut ops = Vec::new();
            let mut built = 0usize;
            let mut token = 0usize;
            while built < n {
                let take = m.min(n - built);
                let values = (0..take)
                    .map(|_| {
                        token += 1;
                        fixed_token(token)
                    })
                    .collect();
                ops.push(WorkloadOp::Append { values });
                built += take;
            }
            CellPlan { setup: 0, ops }
        }
        "get-blocks" => {
            let gets = (n / m).max(1);
            let ops = (0..gets)
                .map(|_| {
                    let k = 1 + rng.below((n - m + 1) as u64) as usize;
                    WorkloadOp::Get { k, m }
                })
                .collect();
            CellPlan { setup: n, ops }
        }
        "insert-middle" => {
            let inserts = (n / (2 * m)).clamp(1, 16);
            let setup = n.saturating_sub(inserts * m);
            let mut len = setup;
            let mut token = 0usize;
            let ops = (0..inserts)
                .map(|_| {
                    let k = len / 2 + 1;
                    let values = (0..m)
                        .map(|_| {
                            token += 1;
                            fixed_token(token)
                        })
                        .collect();
                    len += m;
                    WorkloadOp::Insert { k, values }
                })
                .collect();
            CellPlan { setup, ops }
        }
        "delete-blocks" => {
            let deletes = (n / (2 * m)).clamp(1, 16);
            let setup = n + deletes * m;
            let mut len = setup;
            let ops = (0..deletes)
                .map(|_| {
                    let k = 1 + rng.below((len - m + 1) as u64) as usize;
                    len -= m;
                    WorkloadOp::Delete { k, m }
                })
                .collect();
            CellPlan { setup, ops }
        }
        "mixed" => {
            let count = (n / 16).max(64);
            let weights = OpWeights::default();
            let mut len = n;
            let ops = (0..count)
                .map(|_| {
                    let op = wise_rbt::fuzz::random_valid_op(&mut rng, len, m, &weights, 4 * n);
                    match &op {
                        WorkloadOp::Append { values } => len += values.len(),
                        WorkloadOp::Insert { values, .. } => len += values.len(),
                        WorkloadOp::Delete { m, .. } => len -= m,
                        _ => {}
                    }
                    op
                })
                .collect();
            CellPlan { setup: n, ops }
        }
        _ => unreachable!("workload validated by cmd_bench"),
    }
}

fn run_cell(kind: StructureKind, plan: &CellPlan) -> (u128, CostCounters, usize) {
    let mut runner = Runner::new(kind);
    if plan.setup > 0 {
        let values: Vec<Vec<u8>> = (1..=plan.setup).map(fixed_token).collect();
        runner.setup_append(values);
    }
    runner.reset_counters();
    let before = runner.counters();
    let start = Instant::now();
    for op in &plan.ops {
        runner.apply(op).expect("benchmark workloads are valid");
    }
    let wall = start.elapsed().as_nanos().max(1);
    let counters = runner.counters().since(&before);
    (wall, counters, runner.len())
}

pub fn cmd_bench(workload: &str, ns: &[usize], ms: &[usize], repeats: usize) -> u8 {
    const KNOWN: [&str; 5] = [
        "append-blocks",
        "get-blocks",
        "insert-middle",
        "delete-blocks",
        "mixed",
    ];
    if !KNOWN.contains(&workload) {
        eprintln!(
            "unknown workload: {workload} (expected one of {})",
            KNOWN.join(", ")
        );
        return 2;
    }
    for (&n, &m) in ns.iter().flat_map(|n| ms.iter().map(move |m| (n, m))) {
        if n == 0 || m == 0 {
            eprintln!("n and m must be positive (got n={n}, m={m})");
            return 2;
        }
        if workload != "append-blocks" && m > n {
            eprintln!("block size m={m} exceeds n={n} for workload {workload}");
            return 2;
        }
    }

    println!("{CSV_HEADER}");
    for &n in ns {
        for &m in ms {
            for rep in 0..repeats.max(1) {
                let plan = plan_cell(workload, n, m, rep);
                for (kind, name) in STRUCTURES {
                    let (wall, c, final_len) = run_cell(kind, &plan);
                    println!(
                        "{name},{workload},{final_len},{m},{wall},{},{},{},{}",
                        c.node_visits, c.rotations, c.recolorings, c.key_comparisons
                    );
                }
            }
        }
    }
    0
}
