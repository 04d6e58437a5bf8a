use std::io::Write;
use std::path::Path;

use wise_rbt::{
    apply_to_tree, parse_workload, run_differential_with_faults, FaultInjection, FuzzCase,
    OpOutcome, OracleSeq, TreeError, WiseTree, WorkloadOp,
};

use crate::naive::NaiveSeq;
use crate::StructureKind;

/// One of the three drivable structures behind a uniform op interface.
pub enum Runner {
    Wise(WiseTree),
    Naive(NaiveSeq),
    Array(OracleSeq),
}

impl Runner {
    pub fn new(kind: StructureKind) -> Runner {
        match kind {
            StructureKind::Wise => Runner::Wise(WiseTree::new()),
            StructureKind::Naive => Runner::Naive(NaiveSeq::new()),
            StructureKind::Array => Runner::Array(OracleSeq::new()),
        }
    }

    pub fn apply(&mut self, op: &WorkloadOp) -> Result<OpOutcome, TreeError> {
        match self {
            Runner::Wise(t) => apply_to_tree(t, op),
            Runner::Naive(n) => n.apply(op),
            Runner::Array(o) => o.apply(op),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Runner::Wise(t) => t.len(),
            Runner::Naive(n) => n.len(),
            Runner::Array(o) => o.len(),
        }
    }

    /// Counter snapshot; the array has no counters and reports zeros.
    pub fn counters(&self) -> wise_rbt::CostCounters {
        match self {
            Runner::Wise(t) => t.counters(),
            Runner::Naive(n) => n.counters(),
            Runner::Array(_) => wise_rbt::CostCounters::default(),
        }
    }

    pub fn reset_counters(&self) {
        match self {
            Runner::Wise(t) => t.reset_counters(),
            Runner::Naive(n) => n.reset_counters(),
            Runner::Array(_) => {}
        }
    }

    /// Fast-path bulk append for fixture building (not part of the measured
    /// phase).
    pub fn setup_append(&mut self, values: Vec<Vec<u8>>) {
        if values.is_empty() {
            return;
        }
        match self {
            Runner::Wise(t) => t.block_append(values).expect("setup append"),
            Runner::Naive(n) => n.setup_append(values),
            Runner::Array(o) => {
                o.apply(&WorkloadOp::Append { values })
                    .expect("setup append");
            }
        }
    }
}

fn read_script(path: &Path) -> Result<Vec<WorkloadOp>, u8> {
    let text = match std::fs::read(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return Err(2);
        }
    };
    match parse_workload(&text) {
        Ok(ops) => Ok(ops),
        Err(e) => {
            eprintln!("parse error in {}: {e}", path.display());
            Err(2)
        }
    }
}

fn write_outcome(out: &mut impl Write, result: &Result<OpOutcome, TreeError>) {
    match result {
        Ok(OpOutcome::Values(values)) => {
            out.write_all(b"OK").unwrap();
            for v in values {
                out.write_all(b" ").unwrap();
                out.write_all(v).unwrap();
            }
            out.write_all(b"\n").unwrap();
        }
        Ok(_) => {
            out.write_all(b"OK\n").unwrap();
        }
        Err(e) => {
            out.write_all(b"ERR ").unwrap();
            out.write_all(e.kind_name().as_bytes()).unwrap();
            out.write_all(b"\n").unwrap();
        }
    }
}

pub fn cmd_run(script: &Path, structure: StructureKind) -> u8 {
    let ops = match read_script(script) {
        Ok(ops) => ops,
        Err(code) => return code,
    };
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let mut runner = Runner::new(structure);
    let mut any_err = false;
    for op in &ops {
        let result = runner.apply(op);
        any_err |= result.is_err();
        write_outcome(&mut out, &result);
    }
    out.flush().unwrap();
    u8::from(any_err)
}

pub fn cmd_validate(script: &Path, fault: Option<FaultInjection>) -> u8 {
    let ops = match read_script(script) {
        Ok(ops) => ops,
        Err(code) => return code,
    };
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let mut tree = WiseTree::new();
    tree.inject_faults(fault.unwrap_or_default());
    let mut any_err = false;
    for (i, op) in ops.iter().enumerate() {
        let result = apply_to_tree(&mut tree, op);
        any_err |= result.is_err();
        write_outcome(&mut out, &result);
        let report = tree.validate_structure();
        if !report.is_clean() {
            any_err = true;
            writeln!(out, "VIOLATION after op {}: {report}", i + 1).unwrap();
        }
        if !tree.single_child_is_red_leaf() {
            any_err = true;
            writeln!(
                out,
                "VIOLATION after op {}: one-child shape property",
                i + 1
            )
            .unwrap();
        }
    }
    out.flush().unwrap();
    u8::from(any_err)
}

pub fn cmd_fuzz(
    seeds: u64,
    ops: usize,
    max_block: usize,
    jobs: usize,
    fault: Option<FaultInjection>,
) -> u8 {
    if seeds == 0 {
        println!("0 cases");
        return 0;
    }
    let faults = fault.unwrap_or_default();
    let cases: Vec<FuzzCase> = (0..seeds)
        .map(|s| FuzzCase::new(s, ops, max_block))
        .collect();

    let outcomes = if jobs <= 1 {
        cases
            .iter()
            .map(|c| run_differential_with_faults(c, faults))
            .collect::<Vec<_>>()
    } else {
        // Whole seeds per worker; results reassembled in seed order.
        let workers = jobs.min(cases.len());
        let chunk = cases.len().div_ceil(workers);
        std::thread::scope(|scope| {
            let handles: Vec<_> = cases
                .chunks(chunk)
                .map(|slice| {
                    scope.spawn(move || {
                        slice
                            .iter()
                            .map(|c| run_differential_with_faults(c, faults))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("fuzz worker"))
                .collect::<Vec<_>>()
        })
    };

    let mut failures = 0usize;
    for outcome in &outcomes {
        match &outcome.failure {
            None => println!("seed {}: PASS ({} ops)", outcome.seed, outcome.ops_executed),
            Some(f) => {
                failures += 1;
                println!(
                    "seed {}: FAIL at op {}: {}",
                    outcome.seed,
                    f.op_index + 1,
                    f.detail
                );
                println!(
                    "counterexample ({} ops, shrunk from {}):",
                    f.shrunk.len(),
                    f.ops.len()
                );
                let script = f.shrunk_script();
                print!("{}", String::from_utf8_lossy(&script));
                println!("(save the lines above and replay with: wise-bench validate <file>)");
            }
        }
    }
    println!("{} cases, {} failed", outcomes.len(), failures);
    u8::from(failures > 0)
}
