//! Argument parsing and command dispatch.
//!
//! Exit codes: 0 when the property holds or the construction succeeds, 1
//! when it fails (witnesses are printed), 2 for usage and input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use evidential_core::rationalize::restrict_plan;
use evidential_core::trees::TreeCandidate;
use evidential_core::*;
use serde_json::Value;

use crate::format::{self, Document};
use crate::{fixtures, json};

#[derive(Parser, Debug)]
#[command(name = "evidential", version, about = "Evidential structures, experimentation trees, and plan rationalization")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the five e-structure axioms.
    Check { file: PathBuf },
    /// Rank of every state, with a shortest chain to the root.
    Rank { file: PathBuf },
    /// Canonical sample space and its verification.
    Canonical { file: PathBuf },
    /// Experimentation trees.
    #[command(subcommand)]
    Trees(TreesCommand),
    /// Plans in the file's `alts`/`choose` block.
    #[command(subcommand)]
    Plan(PlanCommand),
    /// Re-check a rationalization document against the file's plan.
    Verify { file: PathBuf, rationalization: PathBuf },
    /// Print the parsed structure.
    Echo { file: PathBuf },
    /// Write the example files into a directory.
    Fixtures { dir: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum TreesCommand {
    /// Enumerate experimentation trees.
    Find {
        file: PathBuf,
        /// Stop after this many trees.
        #[arg(long)]
        max: Option<usize>,
    },
    /// Check tree blocks, or the tree given on the command line.
    Check {
        file: PathBuf,
        /// Only the tree block with this name.
        #[arg(long, conflicts_with_all = ["nodes", "edges"])]
        tree: Option<String>,
        /// Comma-separated node ids.
        #[arg(long, value_delimiter = ',', requires = "edges")]
        nodes: Vec<String>,
        /// Comma-separated `child:parent` edges.
        #[arg(long, value_delimiter = ',')]
        edges: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum PlanCommand {
    /// ISD consistency of the plan.
    Isd { file: PathBuf },
    /// Decide whether the plan is rationalizable, with a witness or a
    /// certificate.
    Decide { file: PathBuf },
    /// Build the atomic rationalization of a tree plan.
    Rationalize {
        file: PathBuf,
        /// Tree block to use; by default the first one, or the whole
        /// structure when the file has none.
        #[arg(long)]
        tree: Option<String>,
    },
}

/// An input or usage problem (exit 2).
#[derive(Debug)]
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

struct Output {
    holds: bool,
    json: Value,
    text: String,
}

impl Output {
    fn new(holds: bool, json: Value, text: String) -> Self {
        Output { holds, json, text }
    }
}

/// Runs one command. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(o) => {
            let written = match cli.format {
                OutputFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&o.json).expect("json")),
                OutputFormat::Text => write!(out, "{}", o.text),
            };
            if written.is_err() {
                return 2;
            }
            if o.holds {
                0
            } else {
                1
            }
        }
        Err(Usage(message)) => {
            let _ = writeln!(err, "error: {message}");
            2
        }
    }
}

fn load(path: &Path) -> Result<Document, Usage> {
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    format::parse(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn require_axioms(s: &EStructure) -> Result<(), Usage> {
    if check_axioms(s).passes() {
        Ok(())
    } else {
        Err(Usage("not an e-structure; `check` lists the failed axioms".into()))
    }
}

fn require_plan(doc: &Document) -> Result<&Plan, Usage> {
    doc.plan.as_ref().ok_or_else(|| Usage("the file has no `alts`/`choose` plan".into()))
}

fn execute(command: &Command) -> Result<Output, Usage> {
    match command {
        Command::Check { file } => check(&load(file)?),
        Command::Rank { file } => rank_cmd(&load(file)?),
        Command::Canonical { file } => canonical(&load(file)?),
        Command::Trees(TreesCommand::Find { file, max }) => trees_find(&load(file)?, *max),
        Command::Trees(TreesCommand::Check {
            file,
            tree,
            nodes,
            edges,
        }) => trees_check(&load(file)?, tree.as_deref(), nodes, edges),
        Command::Plan(PlanCommand::Isd { file }) => plan_isd(&load(file)?),
        Command::Plan(PlanCommand::Decide { file }) => plan_decide(&load(file)?),
        Command::Plan(PlanCommand::Rationalize { file, tree }) => plan_rationalize(&load(file)?, tree.as_deref()),
        Command::Verify { file, rationalization } => {
            let doc = load(file)?;
            let text = std::fs::read_to_string(rationalization)
                .map_err(|e| Usage(format!("{}: {e}", rationalization.display())))?;
            verify(&doc, &text)
        }
        Command::Echo { file } => {
            let doc = load(file)?;
            Ok(Output::new(true, json::echo(&doc.structure), format::print(&doc)))
        }
        Command::Fixtures { dir } => {
            fixtures::write_all(dir)?;
            let names: Vec<&str> = fixtures::ALL.iter().map(|(n, _)| *n).collect();
            let text = names.iter().map(|n| format!("wrote {}\n", dir.join(n).display())).collect();
            Ok(Output::new(true, serde_json::json!({ "written": names }), text))
        }
    }
}

fn check(doc: &Document) -> Result<Output, Usage> {
    let s = &doc.structure;
    let report = check_axioms(s);
    let v = json::axioms(s, &report);
    let mut text = String::new();
    for (r, jv) in report.results.iter().zip(v["axioms"].as_array().expect("array")) {
        if r.passed() {
            text += &format!("axiom {}: holds\n", r.axiom.number());
        } else {
            let w = &jv["witness"];
            text += &format!(
                "axiom {}: fails ({} {})\n",
                r.axiom.number(),
                w["kind"].as_str().unwrap_or(""),
                join_strings(&w["states"])
            );
        }
    }
    text += if report.passes() { "e-structure\n" } else { "not an e-structure\n" };
    Ok(Output::new(report.passes(), v, text))
}

fn join_strings(v: &Value) -> String {
    v.as_array()
        .map(|a| a.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(" "))
        .unwrap_or_default()
}

fn rank_cmd(doc: &Document) -> Result<Output, Usage> {
    let s = &doc.structure;
    let r = rank(s)?;
    let mut text = String::new();
    for x in s.states() {
        let chain: Vec<&str> = r.chains[x].iter().map(|&y| s.name(y)).collect();
        text += &format!("{} {} [{}]\n", s.name(x), r.rank[x], chain.join(" -> "));
    }
    Ok(Output::new(true, json::rank(s, &r), text))
}

fn canonical(doc: &Document) -> Result<Output, Usage> {
    let s = &doc.structure;
    let c = build_canonical(s)?;
    let g = verify_theorem_g(&c, s);
    let mut text = format!("{} atoms\n", c.atom_count());
    for x in s.states() {
        let labels: Vec<String> = c.event(x).iter().map(|&m| json::atom_label(s, &c, m)).collect();
        text += &format!("e({}) = {{{}}}\n", s.name(x), labels.join(", "));
    }
    text += if g.passes() { "verified\n" } else { "verification failed\n" };
    Ok(Output::new(g.passes(), json::canonical(s, &c, &g), text))
}

fn trees_find(doc: &Document, max: Option<usize>) -> Result<Output, Usage> {
    let s = &doc.structure;
    require_axioms(s)?;
    let found = find_trees(s, max);
    let trees: Vec<Value> = found.iter().map(|t| json::tree(s, t)).collect();
    let mut text = String::new();
    if found.is_empty() {
        text += "no experimentation tree\n";
    }
    for (i, t) in found.iter().enumerate() {
        let edges: Vec<String> = t
            .candidate()
            .edges
            .iter()
            .map(|&(c, p)| format!("{}:{}", s.name(c), s.name(p)))
            .collect();
        text += &format!("tree {}: {}\n", i + 1, edges.join(" "));
    }
    let v = serde_json::json!({ "count": found.len(), "trees": trees });
    Ok(Output::new(!found.is_empty(), v, text))
}

fn trees_check(doc: &Document, only: Option<&str>, nodes: &[String], edges: &[String]) -> Result<Output, Usage> {
    let s = &doc.structure;
    let id = |name: &str| s.index_of(name).ok_or_else(|| Usage(format!("unknown state `{name}`")));
    let mut targets: Vec<(Option<String>, TreeCandidate)> = Vec::new();
    if !nodes.is_empty() || !edges.is_empty() {
        let nodes = nodes.iter().map(|n| id(n)).collect::<Result<Vec<_>, _>>()?;
        let edges = edges
            .iter()
            .map(|e| {
                let (c, p) = e
                    .split_once(':')
                    .ok_or_else(|| Usage(format!("edge `{e}` is not `child:parent`")))?;
                Ok((id(c)?, id(p)?))
            })
            .collect::<Result<Vec<_>, Usage>>()?;
        targets.push((None, TreeCandidate { nodes, edges }));
    } else if let Some(name) = only {
        let t = doc.tree(name).ok_or_else(|| Usage(format!("no tree block named `{name}`")))?;
        targets.push((t.name.clone(), t.candidate.clone()));
    } else {
        targets.extend(doc.trees.iter().map(|t| (t.name.clone(), t.candidate.clone())));
    }
    if targets.is_empty() {
        return Err(Usage("no tree to check: add a tree block or pass --nodes/--edges".into()));
    }
    let mut holds = true;
    let mut reports = Vec::new();
    let mut text = String::new();
    for (i, (name, candidate)) in targets.iter().enumerate() {
        let report = check_tree(s, candidate);
        holds &= report.passes();
        let label = name.clone().unwrap_or_else(|| format!("#{}", i + 1));
        let mut v = json::tree_report(s, name.as_deref(), &report);
        let graph = check_graph_tree(candidate);
        v["graph_tree"] = Value::Bool(graph.passes());
        if let Some(cycle) = &graph.cycle {
            v["cycle"] = cycle.iter().map(|&x| s.name(x)).collect();
        }
        if report.passes() {
            text += &format!("{label}: experimentation tree\n");
        } else {
            for violation in v["violations"].as_array().expect("array") {
                text += &format!(
                    "{label}: fails {} ({})\n",
                    violation["condition"].as_str().unwrap_or(""),
                    join_strings(&violation["witness"])
                );
            }
        }
        reports.push(v);
    }
    Ok(Output::new(holds, Value::Array(reports), text))
}

fn plan_isd(doc: &Document) -> Result<Output, Usage> {
    let s = &doc.structure;
    let p = require_plan(doc)?;
    let report = check_isd_plan(s, p);
    let mut text = String::new();
    for v in &report.violations {
        text += &format!(
            "ISD fails at {}: every immediate refinement chooses {}\n",
            s.name(v.state),
            p.alternatives()[v.preferred]
        );
    }
    if report.consistent() {
        text += "ISD consistent\n";
    }
    Ok(Output::new(report.consistent(), json::isd(s, p, &report), text))
}

fn plan_decide(doc: &Document) -> Result<Output, Usage> {
    let s = &doc.structure;
    let p = require_plan(doc)?;
    let d = decide_rationalizable(s, p)?;
    if verify_certificate(&d.system, &d.result) != Ok(true) {
        return Err(Usage("internal error: solver output failed re-verification".into()));
    }
    let v = json::decision(s, p, &d);
    let text = if d.result.is_feasible() {
        let mut t = String::from("rationalizable\n");
        for (atom, w) in v["weights"].as_object().expect("object") {
            t += &format!("p({atom}) = {}\n", w.as_str().unwrap_or(""));
        }
        for (alt, row) in v["utilities"].as_object().expect("object") {
            for (atom, u) in row.as_object().expect("object") {
                t += &format!("f_{alt}({atom}) = {}\n", u.as_str().unwrap_or(""));
            }
        }
        t
    } else {
        let FeasibilityResult::Infeasible { multipliers } = &d.result else {
            unreachable!("infeasible branch")
        };
        let total = multipliers.iter().fold(Rational::from_integer(0.into()), |acc, y| acc + y);
        let mut t = format!(
            "not rationalizable; these rows (each `chosen - rival >= 1` on its event) sum to 0 >= {}:\n",
            json::rational(&total)
        );
        for row in v["certificate"].as_array().expect("array") {
            t += &format!(
                "  {} x [at {}: {} over {}]\n",
                row["multiplier"].as_str().unwrap_or(""),
                row["state"].as_str().unwrap_or(""),
                row["chosen"].as_str().unwrap_or(""),
                row["rival"].as_str().unwrap_or("")
            );
        }
        t
    };
    Ok(Output::new(d.result.is_feasible(), v, text))
}

fn plan_rationalize(doc: &Document, tree: Option<&str>) -> Result<Output, Usage> {
    let s = &doc.structure;
    let p = require_plan(doc)?;
    let block = match tree {
        Some(name) => Some(doc.tree(name).ok_or_else(|| Usage(format!("no tree block named `{name}`")))?),
        None => doc.trees.first(),
    };
    let t = match block {
        Some(b) => ExperimentationTree::new(s, &b.candidate),
        None => ExperimentationTree::from_structure(s),
    };
    let t = match t {
        Ok(t) => t,
        Err(Error::NotATree(report)) => {
            let v = json::tree_report(s, block.and_then(|b| b.name.as_deref()), &report);
            return Ok(Output::new(false, v, "not an experimentation tree\n".into()));
        }
        Err(e) => return Err(e.into()),
    };
    let local = restrict_plan(&t, p)?;
    if local.domain().count() != t.len() {
        return Err(Usage("the plan must choose at every tree node".into()));
    }
    let report = check_isd_plan(t.structure(), &local);
    if !report.consistent() {
        let mut text = String::new();
        for v in &report.violations {
            text += &format!(
                "ISD fails at {}: every child chooses {}\n",
                t.name(v.state),
                p.alternatives()[v.preferred]
            );
        }
        return Ok(Output::new(false, json::isd(t.structure(), &local, &report), text));
    }
    let r = construct_sceu(&t, &local)?;
    let verdict = verify_rationalization(t.structure(), &local, &r.explicit())?;
    let v = json::rationalization(&t, &local, &r, &verdict);
    let mut text = format!("{} sample points\n", r.len());
    for (i, pt) in v["points"].as_array().expect("array").iter().enumerate() {
        text += &format!(
            "  atom {} at {}: p = {}\n",
            pt["atom"].as_str().unwrap_or(""),
            pt["state"].as_str().unwrap_or(""),
            json::rational(&r.weights[i])
        );
    }
    text += &format!(
        "verified: {} (minimum margin {})\n",
        verdict.satisfied,
        verdict.min_margin.as_ref().map(json::rational).unwrap_or_default()
    );
    Ok(Output::new(verdict.satisfied, v, text))
}

fn verify(doc: &Document, text: &str) -> Result<Output, Usage> {
    let s = &doc.structure;
    let p = require_plan(doc)?;
    let (explicit, restricted) = json::read_rationalization(text, s, p)?;
    let report = verify_rationalization(s, &restricted, &explicit)?;
    let mut out = String::new();
    for v in json::verification(s, &restricted, &report)["failures"].as_array().expect("array") {
        out += &format!(
            "fails at {}: {} not strictly better than {} (margin {})\n",
            v["state"].as_str().unwrap_or(""),
            v["chosen"].as_str().unwrap_or(""),
            v["rival"].as_str().unwrap_or(""),
            v["margin"].as_str().unwrap_or("")
        );
    }
    out += if report.satisfied { "verified\n" } else { "not verified\n" };
    Ok(Output::new(report.satisfied, json::verification(s, &restricted, &report), out))
}
