//! End-to-end tests driving the built binary.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wise-bench"))
}

fn write_script(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(text.as_bytes()).unwrap();
    path
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const SCENARIO: &str = "APPEND 5 A B C D E\nSET 2 3 F G H\nGET 1 5\nDELETE 2 3\nGET 1 2\n";

#[test]
fn run_executes_the_block_scenario_on_all_structures() {
    let dir = tempfile::tempdir().unwrap();
    let script = write_script(dir.path(), "scenario.txt", SCENARIO);
    for structure in ["wise", "naive", "array"] {
        let out = bin()
            .args(["run"])
            .arg(&script)
            .args(["--structure", structure])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{structure}: {out:?}");
        assert_eq!(
            stdout_of(&out),
            "OK\nOK\nOK A F G H E\nOK\nOK A E\n",
            "{structure} output"
        );
    }
}

#[test]
fn run_reports_errors_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let script = write_script(
        dir.path(),
        "errs.txt",
        "APPEND 2 A B\nGET 2 3\nSET 1 0\nGET 1 2\n",
    );
    let out = bin().arg("run").arg(&script).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        stdout_of(&out),
        "OK\nERR RankOutOfRange\nERR EmptyBlock\nOK A B\n"
    );
}

#[test]
fn empty_script_is_a_silent_success() {
    let dir = tempfile::tempdir().unwrap();
    let script = write_script(dir.path(), "empty.txt", "");
    let out = bin().arg("run").arg(&script).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out), "");
}

#[test]
fn parse_errors_exit_two_with_a_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let script = write_script(dir.path(), "bad.txt", "APPEND 1 A\nGET two 1\n");
    let out = bin().arg("run").arg(&script).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "stderr: {err}");
}

#[test]
fn validate_accepts_a_healthy_run() {
    let dir = tempfile::tempdir().unwrap();
    let script = write_script(dir.path(), "scenario.txt", SCENARIO);
    let out = bin().arg("validate").arg(&script).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(!stdout_of(&out).contains("VIOLATION"));
}

#[test]
fn fuzz_zero_seeds_prints_zero_cases() {
    let out = bin()
        .args(["fuzz", "--seeds", "0", "--ops", "10", "--max-block", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out), "0 cases\n");
}

#[test]
fn fuzz_small_campaign_passes() {
    let out = bin()
        .args([
            "fuzz",
            "--seeds",
            "3",
            "--ops",
            "400",
            "--max-block",
            "8",
            "--jobs",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("seed 0: PASS"));
    assert!(text.contains("seed 2: PASS"));
    assert!(text.contains("3 cases, 0 failed"));
}

#[test]
fn fuzz_with_injected_fault_fails_and_emits_a_replayable_script() {
    let out = bin()
        .args([
            "fuzz",
            "--seeds",
            "4",
            "--ops",
            "2000",
            "--max-block",
            "16",
            "--inject-fault",
            "rotation-adjustment",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = stdout_of(&out);
    assert!(text.contains("FAIL"), "{text}");
    assert!(text.contains("counterexample"), "{text}");

    // The printed counterexample is itself a valid workload script, and a
    // healthy build replays it cleanly.
    let cex: String = text
        .lines()
        .skip_while(|l| !l.starts_with("counterexample"))
        .skip(1)
        .take_while(|l| !l.starts_with('('))
        .map(|l| format!("{l}\n"))
        .collect();
    assert!(!cex.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let script = write_script(dir.path(), "cex.txt", &cex);
    // Still bites when replayed against the same broken build…
    let out = bin()
        .arg("validate")
        .arg(&script)
        .args(["--inject-fault", "rotation-adjustment"])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(1),
        "broken replay: {}",
        stdout_of(&out)
    );
    assert!(stdout_of(&out).contains("VIOLATION"));
    // …and a healthy build replays it cleanly.
    let out = bin().arg("validate").arg(&script).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "healthy replay: {}",
        stdout_of(&out)
    );
}

#[test]
fn bench_emits_the_exact_csv_schema() {
    let out = bin()
        .args([
            "bench",
            "get-blocks",
            "--n",
            "1024",
            "--m",
            "16,32",
            "--repeats",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("structure,workload,n,m,wallNanos,nodeVisits,rotations,recolorings,comparisons")
    );
    let rows: Vec<&str> = lines.collect();
    // 1 n x 2 m x 2 repeats x 3 structures.
    assert_eq!(rows.len(), 12);
    for row in &rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 9, "row: {row}");
        assert!(["wise", "naive", "array"].contains(&cols[0]));
        assert_eq!(cols[1], "get-blocks");
        assert_eq!(cols[2], "1024");
        let wall: u64 = cols[4].parse().unwrap();
        assert!(wall > 0);
        if cols[0] == "array" {
            assert_eq!(&cols[5..], &["0", "0", "0", "0"], "array counters: {row}");
        }
    }
    // Counter columns are deterministic: a second run matches except wall.
    let again = bin()
        .args([
            "bench",
            "get-blocks",
            "--n",
            "1024",
            "--m",
            "16,32",
            "--repeats",
            "2",
        ])
        .output()
        .unwrap();
    let strip_wall = |t: &str| -> Vec<String> {
        t.lines()
            .map(|l| {
                let cols: Vec<&str> = l.split(',').collect();
                if cols.len() == 9 {
                    format!(
                        "{},{},{},{},{},{},{},{}",
                        cols[0], cols[1], cols[2], cols[3], cols[5], cols[6], cols[7], cols[8]
                    )
                } else {
                    l.to_string()
                }
            })
            .collect()
    };
    assert_eq!(strip_wall(&text), strip_wall(&stdout_of(&again)));
}

#[test]
fn bench_shows_the_cost_separation() {
    // Appends: the block path never visits or compares; the per-element
    // baseline pays descents. Reads: block visits stay well under the
    // per-element baseline.
    let out = bin()
        .args(["bench", "append-blocks", "--n", "4096", "--m", "64"])
        .output()
        .unwrap();
    let text = stdout_of(&out);
    let field = |line: &str, i: usize| -> u64 { line.split(',').nth(i).unwrap().parse().unwrap() };
    let wise = text.lines().find(|l| l.starts_with("wise,")).unwrap();
    let naive = text.lines().find(|l| l.starts_with("naive,")).unwrap();
    assert_eq!(field(wise, 5), 0, "wise append visits");
    assert_eq!(field(wise, 8), 0, "wise append comparisons");
    assert!(field(naive, 5) > 0, "naive append must descend");

    let out = bin()
        .args(["bench", "get-blocks", "--n", "4096", "--m", "64"])
        .output()
        .unwrap();
    let text = stdout_of(&out);
    let wise = text.lines().find(|l| l.starts_with("wise,")).unwrap();
    let naive = text.lines().find(|l| l.starts_with("naive,")).unwrap();
    assert!(
        field(wise, 5) < field(naive, 5),
        "block reads should visit fewer nodes: {wise} vs {naive}"
    );
}

#[test]
fn bench_rejects_bad_grids() {
    let out = bin()
        .args(["bench", "mystery", "--n", "64", "--m", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["bench", "get-blocks", "--n", "64", "--m", "128"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["fuzz", "--seeds", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_block_size_keeps_the_paths_comparable() {
    // At m = 1 a block read and a per-element read are the same descent;
    // the two structures must count visits within 2x of each other.
    let out = bin()
        .args(["bench", "get-blocks", "--n", "4096", "--m", "1"])
        .output()
        .unwrap();
    let text = stdout_of(&out);
    let field = |line: &str, i: usize| -> u64 { line.split(',').nth(i).unwrap().parse().unwrap() };
    let wise = field(text.lines().find(|l| l.starts_with("wise,")).unwrap(), 5);
    let naive = field(text.lines().find(|l| l.starts_with("naive,")).unwrap(), 5);
    assert!(wise > 0 && naive > 0);
    assert!(
        wise <= 2 * naive && naive <= 2 * wise,
        "wise={wise}, naive={naive}"
    );
}
