//! `hiergraph`: validate hierarchies, enumerate rule matches and propagate
//! rewrites from the command line.
//!
//! Exit codes: 0 on success, 1 when the input is well-formed but violates a
//! domain condition, 2 on I/O and parse errors.

use clap::{Parser, Subcommand, ValueEnum};
use hiergraph::propagation::{build_plan, check_composability, propagate_with_relation, Direction, Factorizations, PlanFile, Relation};
use hiergraph::rules::find_matches;
use hiergraph::{Error, Hierarchy, Homomorphism, MatchKind, NodeId, NodeMap, Rule};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hiergraph", version, about = "Rewriting and update propagation in graph hierarchies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that every graph and typing is well-formed and that all paths commute.
    Validate { hierarchy: PathBuf },
    /// List the matches of a rule in one graph of a hierarchy as JSON.
    Match {
        hierarchy: PathBuf,
        node: String,
        rule: PathBuf,
        /// Which side of the rule to match.
        #[arg(long, value_enum, default_value_t = Kind::Lhs)]
        kind: Kind,
        /// Fix the image of a pattern node, as `pattern=host`. Repeatable.
        #[arg(long = "anchor", value_parser = parse_anchor)]
        anchors: Vec<(NodeId, NodeId)>,
    },
    /// Apply a rule at one of its matches and propagate the update.
    Rewrite {
        hierarchy: PathBuf,
        node: String,
        rule: PathBuf,
        /// Position of the match in the list printed by `match`.
        match_index: usize,
        #[arg(long, value_enum)]
        direction: Dir,
        /// Anchors restricting the match enumeration, as for `match`.
        #[arg(long = "anchor", value_parser = parse_anchor)]
        anchors: Vec<(NodeId, NodeId)>,
        /// Per-object factorizations and connectors.
        #[arg(long, conflicts_with_all = ["relation", "canonical"])]
        plan: Option<PathBuf>,
        /// Relation between the rule and the objects it reaches.
        #[arg(long, conflicts_with = "canonical")]
        relation: Option<PathBuf>,
        /// Use canonical factorizations everywhere (the default).
        #[arg(long)]
        canonical: bool,
        /// Where to write the rewritten hierarchy; standard output if absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Where to write the report of the propagation.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// Instances of the left-hand side.
    Lhs,
    /// Instances of the interface.
    Interface,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    Fwd,
    Bwd,
}

impl From<Dir> for Direction {
    fn from(d: Dir) -> Self {
        match d {
            Dir::Fwd => Direction::Forward,
            Dir::Bwd => Direction::Backward,
        }
    }
}

fn parse_anchor(s: &str) -> Result<(NodeId, NodeId), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.is_empty() && !v.is_empty() => Ok((NodeId::from(k), NodeId::from(v))),
        _ => Err(format!("expected pattern=host, got `{s}`")),
    }
}

enum Failure {
    /// Domain violation: the lines are printed to standard output.
    Domain(Vec<String>),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Json(e) => Failure::Io(e.to_string()),
            Error::NotComposable(v) => Failure::Domain(v.iter().map(|x| x.to_string()).collect()),
            Error::NotCommutative(v) => Failure::Domain(v.iter().map(|x| x.to_string()).collect()),
            e => Failure::Domain(vec![e.to_string()]),
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn read<T: DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn write(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_valid(path: &Path) -> Outcome<Hierarchy> {
    let h: Hierarchy = read(path)?;
    let violations = h.validate();
    if !violations.is_empty() {
        return Err(Failure::Domain(violations.iter().map(|v| v.to_string()).collect()));
    }
    Ok(h)
}

fn validate(path: &Path) -> Outcome {
    load_valid(path)?;
    println!("ok");
    Ok(())
}

fn matches(h: &Hierarchy, node: &str, rule: &Rule, kind: MatchKind, anchors: &[(NodeId, NodeId)]) -> Outcome<Vec<NodeMap>> {
    let host = h.object(node).ok_or_else(|| Failure::from(Error::UnknownObject(node.to_string())))?;
    let anchors: NodeMap = anchors.iter().cloned().collect();
    Ok(find_matches(rule, host, kind, &anchors).into_iter().map(|m| m.into_map()).collect())
}

fn cmd_match(hierarchy: &Path, node: &str, rule: &Path, kind: Kind, anchors: &[(NodeId, NodeId)]) -> Outcome {
    let h = load_valid(hierarchy)?;
    let rule: Rule = read(rule)?;
    let kind = match kind {
        Kind::Lhs => MatchKind::Restrictive,
        Kind::Interface => MatchKind::Expansive,
    };
    write(None, &to_json(&matches(&h, node, &rule, kind, anchors)?))
}

struct RewriteArgs<'a> {
    hierarchy: &'a Path,
    node: &'a str,
    rule: &'a Path,
    match_index: usize,
    direction: Direction,
    anchors: &'a [(NodeId, NodeId)],
    plan: Option<&'a Path>,
    relation: Option<&'a Path>,
    output: Option<&'a Path>,
    report: Option<&'a Path>,
}

fn cmd_rewrite(a: RewriteArgs) -> Outcome {
    let mut h = load_valid(a.hierarchy)?;
    let rule: Rule = read(a.rule)?;
    let plan_file: Option<PlanFile> = a.plan.map(read).transpose()?;
    let relation = match a.relation {
        Some(p) => Some(Relation::from_json(&read(p)?, a.direction).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let found = matches(&h, a.node, &rule, a.direction.match_kind(), a.anchors)?;
    let Some(m) = found.get(a.match_index) else {
        return Err(Failure::Domain(vec![format!("match index {} out of range: {} match(es)", a.match_index, found.len())]));
    };
    let pattern = match a.direction {
        Direction::Forward => rule.interface(),
        Direction::Backward => rule.lhs(),
    };
    let instance = Homomorphism::from_parts(pattern.clone(), h.object(a.node).unwrap().clone(), m.clone());
    let rp = build_plan(&h, a.node, &rule, &instance, a.direction, plan_file.as_ref(), relation.as_ref())?;
    let violations = check_composability(&h, &rp.plan)?;
    if !violations.is_empty() {
        return Err(Failure::Domain(violations.iter().map(|v| v.to_string()).collect()));
    }
    if let Factorizations::Forward(fs) = &rp.plan.factorizations {
        for (n, f) in fs.iter().filter(|(_, f)| !f.pre.is_mono()) {
            eprintln!("warning: the factorization for {n} identifies nodes of the matched pattern ({} -> {})", f.pre.source().node_count(), f.mid.node_count());
        }
    }
    let report = propagate_with_relation(&mut h, &rp)?;
    write(a.output, &to_json(&h))?;
    if let Some(p) = a.report {
        write(Some(p), &to_json(&report))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { hierarchy } => validate(&hierarchy),
        Command::Match { hierarchy, node, rule, kind, anchors } => cmd_match(&hierarchy, &node, &rule, kind, &anchors),
        Command::Rewrite { hierarchy, node, rule, match_index, direction, anchors, plan, relation, canonical: _, output, report } => cmd_rewrite(RewriteArgs {
            hierarchy: &hierarchy,
            node: &node,
            rule: &rule,
            match_index,
            direction: direction.into(),
            anchors: &anchors,
            plan: plan.as_deref(),
            relation: relation.as_deref(),
            output: output.as_deref(),
            report: report.as_deref(),
        }),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(lines)) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
