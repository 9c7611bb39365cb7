//! Acceptance suite: one PASS or FAIL line per criterion, at full size.
//! Exits non-zero if any criterion fails.

mod corpus;

use hiergraph_testkit::criteria::{self, Outcome};
use std::process::ExitCode;
use std::time::Instant;

/// Random instances per construction for the oracle suite.
const ORACLE_INSTANCES: usize = 200;
/// Random single-arrow instances per equivalence.
const EQUIVALENCE_INSTANCES: usize = 100;
/// Random hierarchies, each rewritten once in each direction.
const HIERARCHIES: usize = 100;
/// Full runs of the CLI corpus compared for determinism.
const CLI_RUNS: usize = 2;

const SEED: u64 = 0x5eed;

fn determinism() -> Outcome {
    let mut failures = Vec::new();
    let dirs: Vec<_> = (0..CLI_RUNS).map(|_| tempfile::tempdir().expect("temp dir")).collect();
    let runs: Vec<Vec<corpus::Run>> = dirs.iter().map(|d| corpus::CASES.iter().map(|c| corpus::run(c, d.path())).collect()).collect();
    for (i, case) in corpus::CASES.iter().enumerate() {
        let first = &runs[0][i];
        if first.exit != Some(case.exit) {
            failures.push(format!("{}: exit {:?}, expected {}", case.name, first.exit, case.exit));
        }
        if runs.iter().any(|r| r[i] != *first) {
            failures.push(format!("{}: outputs differ between runs", case.name));
        }
    }
    let passed = failures.is_empty();
    let detail = match failures.first() {
        None => format!("{} cases x {CLI_RUNS} runs, byte-identical stdout and output files", corpus::CASES.len()),
        Some(f) => format!("{} failure(s), first: {f}", failures.len()),
    };
    Outcome { passed, detail }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut report = |id: &'static str, o: Outcome| {
        println!("{} {id}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        results.push((id, o));
    };

    report("1 universal-property oracles", criteria::up_oracles(ORACLE_INSTANCES, SEED));
    report("2 forward merge-and-add golden", criteria::forward_golden());
    report("3 backward delete-and-refine golden", criteria::backward_golden());
    let eq = criteria::equivalences(EQUIVALENCE_INSTANCES, SEED);
    let all = [("projection", &eq.projection), ("lifting", &eq.lifting), ("phased", &eq.phased)];
    let combined = Outcome {
        passed: all.iter().all(|(_, o)| o.passed),
        detail: all.iter().map(|(n, o)| format!("{n}: {}", o.detail)).collect::<Vec<_>>().join("; "),
    };
    report("4 equivalent constructions", combined);
    let runs = criteria::hierarchy_runs(HIERARCHIES, SEED);
    report("5 hierarchy validity", criteria::hierarchy_validity(&runs));
    report("6 composability detection", criteria::composability(&runs));
    report("7 CLI determinism", determinism());

    let failed = results.iter().filter(|(_, o)| !o.passed).count();
    println!("{} of {} criteria passed in {:.1?}", results.len() - failed, results.len(), start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
