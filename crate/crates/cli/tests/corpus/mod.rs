#![allow(dead_code)]

//! The fixture corpus: every CLI invocation the tests and the acceptance
//! suite replay, with its expected exit code and outputs.

use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    /// Arguments; `@name` is a file in the output directory.
    pub args: &'static [&'static str],
    pub exit: i32,
    /// Expected standard output, if it is checked verbatim.
    pub stdout: Option<&'static str>,
    /// Output files and the golden each must equal, relative to the crate.
    pub files: &'static [(&'static str, &'static str)],
}

pub const CASES: &[Case] = &[
    Case { name: "validate_two_objects", args: &["validate", "colors.json"], exit: 0, stdout: Some("ok\n"), files: &[] },
    Case {
        name: "validate_broken_diamond",
        args: &["validate", "broken_diamond.json"],
        exit: 1,
        stdout: Some("PAIR a d: a->b->d != a->c->d at node x\n"),
        files: &[],
    },
    Case { name: "validate_missing", args: &["validate", "missing.json"], exit: 2, stdout: Some(""), files: &[] },
    Case {
        name: "match_all",
        args: &["match", "colors.json", "G", "merge_add.rule.json", "--kind", "interface"],
        exit: 0,
        stdout: None,
        files: &[],
    },
    Case {
        name: "match_anchored",
        args: &["match", "colors.json", "G", "merge_add.rule.json", "--kind", "interface", "--anchor", "w=w1"],
        exit: 0,
        stdout: None,
        files: &[],
    },
    Case { name: "match_none", args: &["match", "colors.json", "G", "delete_refine.rule.json"], exit: 0, stdout: Some("[]\n"), files: &[] },
    Case {
        name: "forward_canonical",
        args: &["rewrite", "colors.json", "G", "merge_add.rule.json", "0", "--direction", "fwd", "--canonical", "-o", "@h.json", "--report", "@r.json"],
        exit: 0,
        stdout: Some(""),
        files: &[("h.json", "../testkit/golden/forward_canonical.json"), ("r.json", "tests/golden/forward_canonical.report.json")],
    },
    Case {
        name: "forward_cleanup",
        args: &["rewrite", "colors.json", "G", "merge_add.rule.json", "0", "--direction", "fwd", "--relation", "merge_add.cleanup.relation.json", "-o", "@h.json", "--report", "@r.json"],
        exit: 0,
        stdout: Some(""),
        files: &[("h.json", "../testkit/golden/forward_cleanup.json"), ("r.json", "tests/golden/forward_cleanup.report.json")],
    },
    Case {
        name: "forward_strict_variant",
        args: &["rewrite", "colors_square.json", "G", "merge_add.rule.json", "0", "--direction", "fwd", "--plan", "merge_add.strict.plan.json", "-o", "@h.json"],
        exit: 0,
        stdout: Some(""),
        files: &[("h.json", "../testkit/golden/forward_strict_variant.json")],
    },
    Case {
        name: "backward_refinement",
        args: &["rewrite", "shapes.json", "T", "delete_refine.rule.json", "0", "--direction", "bwd", "--relation", "delete_refine.relation.json", "-o", "@h.json", "--report", "@r.json"],
        exit: 0,
        stdout: Some(""),
        files: &[("h.json", "../testkit/golden/backward_refinement.json"), ("r.json", "tests/golden/backward_refinement.report.json")],
    },
    Case {
        name: "backward_partial",
        args: &["rewrite", "shapes_partial.json", "T", "delete_refine.rule.json", "0", "--direction", "bwd", "--relation", "delete_refine.relation.json", "-o", "@h.json"],
        exit: 0,
        stdout: Some(""),
        files: &[("h.json", "../testkit/golden/backward_partial.json")],
    },
    Case {
        name: "sets",
        args: &["rewrite", "sets.json", "n0", "sets.rule.json", "0", "--direction", "fwd", "--relation", "sets.relation.json", "-o", "@h.json", "--report", "@r.json"],
        exit: 0,
        stdout: Some(""),
        files: &[("h.json", "../testkit/golden/set_example.json"), ("r.json", "tests/golden/sets.report.json")],
    },
    Case {
        name: "diamond",
        args: &["rewrite", "diamond.json", "G0", "diamond.rule.json", "0", "--direction", "bwd", "--relation", "diamond.relation.json", "-o", "@h.json", "--report", "@r.json"],
        exit: 0,
        stdout: Some(""),
        files: &[("h.json", "../testkit/golden/diamond_example.json"), ("r.json", "tests/golden/diamond.report.json")],
    },
    Case {
        name: "chain_rejected",
        args: &["rewrite", "chain.json", "G0", "chain.rule.json", "0", "--direction", "fwd", "--plan", "chain.plan.json", "-o", "@h.json"],
        exit: 1,
        stdout: Some("CONNECTOR G1 -> G2: no arrow between the middle objects satisfies the connector conditions\n"),
        files: &[],
    },
    Case {
        name: "match_index_out_of_range",
        args: &["rewrite", "colors.json", "G", "merge_add.rule.json", "4", "--direction", "fwd", "-o", "@h.json"],
        exit: 1,
        stdout: Some("match index 4 out of range: 4 match(es)\n"),
        files: &[],
    },
];

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixtures() -> PathBuf {
    crate_dir().join("tests/fixtures")
}

/// Everything one run of a case produced.
#[derive(Debug, PartialEq, Eq)]
pub struct Run {
    pub exit: Option<i32>,
    pub stdout: Vec<u8>,
    pub files: Vec<(String, Option<Vec<u8>>)>,
}

/// Runs `case` with outputs going to `out`.
pub fn run(case: &Case, out: &Path) -> Run {
    let args: Vec<String> = case
        .args
        .iter()
        .map(|a| match a.strip_prefix('@') {
            Some(f) => out.join(f).to_string_lossy().into_owned(),
            None => a.to_string(),
        })
        .collect();
    let o = Command::new(env!("CARGO_BIN_EXE_hiergraph")).args(&args).current_dir(fixtures()).output().expect("binary runs");
    let files = case.args.iter().filter_map(|a| a.strip_prefix('@')).map(|f| (f.to_string(), std::fs::read(out.join(f)).ok())).collect();
    Run { exit: o.status.code(), stdout: o.stdout, files }
}
