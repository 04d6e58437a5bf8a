mod bench;
mod naive;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wise_rbt::FaultInjection;

#[derive(Parser)]
#[command(
    name = "wise-bench",
    version,
    about = "Workload runner, differential fuzzer and counter benchmark for the wise \
             red-black tree sequence"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StructureKind {
    /// The left-size-augmented red-black tree with block operations.
    Wise,
    /// The same tree driven one element (and one root descent) at a time.
    Naive,
    /// Plain dynamic array.
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FaultKind {
    /// Drop the left-size adjustment rotations perform.
    RotationAdjustment,
    /// Drop the left-size pre-increment on the insert descent.
    InsertPreincrement,
    /// Drop the left-size compensation around delete-fixup rotations.
    DeleteCompensation,
}

impl FaultKind {
    fn injection(self) -> FaultInjection {
        match self {
            FaultKind::RotationAdjustment => FaultInjection {
                skip_rotation_adjustment: true,
                ..Default::default()
            },
            FaultKind::InsertPreincrement => FaultInjection {
                skip_insert_preincrement: true,
                ..Default::default()
            },
            FaultKind::DeleteCompensation => FaultInjection {
                skip_delete_compensation: true,
                ..Default::default()
            },
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Execute a workload script, printing one OK/ERR line per operation.
    ///
    /// GET prints `OK v1 ... vm`, mutations print `OK`, failed operations
    /// print `ERR <kind>` and execution continues. Exit 0 iff no operation
    /// errored.
    Run {
        script: PathBuf,
        #[arg(long, value_enum, default_value_t = StructureKind::Wise)]
        structure: StructureKind,
    },
    /// Replay a workload script with full structural validation after every
    /// operation. Violations are printed and make the exit code 1.
    Validate {
        script: PathBuf,
        /// Self-test aid: replay against a tree with one bookkeeping rule
        /// disabled (to confirm a counterexample still bites).
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<FaultKind>,
    },
    /// Differential fuzz campaign: replays random operation sequences
    /// against the tree and the array oracle, validating after every op.
    /// Prints per-seed pass/fail and shrunk counterexamples as replayable
    /// workload scripts.
    Fuzz {
        /// Number of seeds (cases), numbered from 0.
        #[arg(long)]
        seeds: u64,
        /// Operations per seed.
        #[arg(long)]
        ops: usize,
        /// Largest generated block size.
        #[arg(long = "max-block")]
        max_block: usize,
        /// Worker threads; each runs whole seeds.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Self-test aid: disable one piece of size bookkeeping and confirm
        /// the campaign catches it.
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<FaultKind>,
    },
    /// Run a named workload over structure/size/block grids and emit one
    /// CSV row per repeat on stdout.
    ///
    /// Workloads: append-blocks (build n by appending m at a time),
    /// get-blocks (read blocks of m at random ranks), insert-middle (insert
    /// blocks of m at the middle), delete-blocks (delete blocks of m at
    /// random ranks), mixed (random block ops at the default weights
    /// get/set/append/insert/delete = 30/15/20/15/20). Counter columns are
    /// deterministic; wallNanos is not. The array baseline reports zero
    /// counters.
    Bench {
        workload: String,
        /// Comma-separated sequence sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Comma-separated block sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { script, structure } => run::cmd_run(&script, structure),
        Command::Validate {
            script,
            inject_fault,
        } => run::cmd_validate(&script, inject_fault.map(FaultKind::injection)),
        Command::Fuzz {
            seeds,
            ops,
            max_block,
            jobs,
            inject_fault,
        } => run::cmd_fuzz(
            seeds,
            ops,
            max_block,
            jobs,
            inject_fault.map(FaultKind::injection),
        ),
        Command::Bench {
            workload,
            n,
            m,
            repeats,
        } => bench::cmd_bench(&workload, &n, &m, repeats),
    };
    ExitCode::from(code)
}
