//! The line-oriented structure file.
//!
//! ```text
//! # comment
//! root nothing
//! state x
//! pair x nothing          # x strictly more specific than nothing
//! tree T2 {
//!   node nothing x y
//!   edge x nothing
//! }
//! alts a b
//! choose x a
//! ```
//!
//! States are numbered in the order of their `root`/`state` lines. Tree
//! blocks may also sit on one line: `tree { node a b c edge b a edge c a }`.

use std::fmt::Write as _;

use evidential_core::trees::TreeCandidate;
use evidential_core::{EStructure, Plan};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("no `root` line")]
    MissingRoot,
    #[error("line {line}: unknown state `{id}`")]
    UnknownState { line: usize, id: String },
    #[error("line {line}: unknown alternative `{id}`")]
    UnknownAlternative { line: usize, id: String },
    #[error(transparent)]
    Structure(#[from] evidential_core::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeBlock {
    pub name: Option<String>,
    pub candidate: TreeCandidate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub structure: EStructure,
    pub trees: Vec<TreeBlock>,
    pub plan: Option<Plan>,
}

impl Document {
    pub fn tree(&self, name: &str) -> Option<&TreeBlock> {
        self.trees.iter().find(|t| t.name.as_deref() == Some(name))
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

struct RawTree {
    line: usize,
    name: Option<String>,
    nodes: Vec<(usize, String)>,
    edges: Vec<(usize, String, String)>,
}

pub fn parse(text: &str) -> Result<Document, ParseError> {
    let mut names: Vec<String> = Vec::new();
    let mut root: Option<String> = None;
    let mut pairs: Vec<(usize, String, String)> = Vec::new();
    let mut trees: Vec<RawTree> = Vec::new();
    let mut alts: Option<(usize, Vec<String>)> = None;
    let mut choices: Vec<(usize, String, String)> = Vec::new();
    let mut open: Option<RawTree> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if open.is_none() {
            match tokens[0] {
                "root" | "state" => {
                    let [kw, id] = tokens[..] else {
                        return Err(syntax(line, format!("expected `{} <id>`", tokens[0])));
                    };
                    if kw == "root" {
                        if root.is_some() {
                            return Err(syntax(line, "second `root` line"));
                        }
                        root = Some(id.to_string());
                    }
                    if names.iter().any(|n| n == id) {
                        // `state` naming an already declared root is allowed.
                        if kw == "root" || root.as_deref() != Some(id) {
                            return Err(evidential_core::Error::DuplicateState(id.into()).into());
                        }
                    } else {
                        names.push(id.to_string());
                    }
                    continue;
                }
                "pair" => {
                    let [_, x, y] = tokens[..] else {
                        return Err(syntax(line, "expected `pair <x> <y>`"));
                    };
                    pairs.push((line, x.into(), y.into()));
                    continue;
                }
                "alts" => {
                    if alts.is_some() {
                        return Err(syntax(line, "second `alts` line"));
                    }
                    alts = Some((line, tokens[1..].iter().map(|s| s.to_string()).collect()));
                    continue;
                }
                "choose" => {
                    let [_, x, a] = tokens[..] else {
                        return Err(syntax(line, "expected `choose <state> <alt>`"));
                    };
                    choices.push((line, x.into(), a.into()));
                    continue;
                }
                "tree" => {
                    let brace = tokens
                        .iter()
                        .position(|&t| t == "{")
                        .ok_or_else(|| syntax(line, "expected `{` after `tree`"))?;
                    let name = match brace {
                        1 => None,
                        2 => Some(tokens[1].to_string()),
                        _ => return Err(syntax(line, "expected `tree [name] {`")),
                    };
                    open = Some(RawTree {
                        line,
                        name,
                        nodes: Vec::new(),
                        edges: Vec::new(),
                    });
                    tokens.drain(..=brace);
                }
                other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
            }
        }
        let tree = open.as_mut().expect("inside a tree block");
        let mut k = 0;
        while k < tokens.len() {
            match tokens[k] {
                "}" => {
                    if k + 1 != tokens.len() {
                        return Err(syntax(line, "text after `}`"));
                    }
                    trees.push(open.take().expect("open block"));
                    break;
                }
                "node" => {
                    k += 1;
                    while k < tokens.len() && !matches!(tokens[k], "node" | "edge" | "}") {
                        tree.nodes.push((line, tokens[k].to_string()));
                        k += 1;
                    }
                }
                "edge" => {
                    if k + 2 >= tokens.len() {
                        return Err(syntax(line, "expected `edge <child> <parent>`"));
                    }
                    let (c, p) = (tokens[k + 1], tokens[k + 2]);
                    if matches!(c, "node" | "edge" | "}") || matches!(p, "node" | "edge" | "}") {
                        return Err(syntax(line, "expected `edge <child> <parent>`"));
                    }
                    tree.edges.push((line, c.into(), p.into()));
                    k += 3;
                }
                other => return Err(syntax(line, format!("unexpected `{other}` in tree block"))),
            }
        }
    }
    if let Some(t) = open {
        return Err(syntax(t.line, "tree block is not closed"));
    }

    let root = root.ok_or(ParseError::MissingRoot)?;
    let index = |line: usize, id: &str| {
        names.iter().position(|n| n == id).ok_or_else(|| ParseError::UnknownState {
            line,
            id: id.to_string(),
        })
    };
    let gens = pairs
        .iter()
        .map(|(line, x, y)| Ok((index(*line, x)?, index(*line, y)?)))
        .collect::<Result<Vec<_>, ParseError>>()?;
    let root_index = index(0, &root)?;

    let trees = trees
        .iter()
        .map(|t| {
            let nodes = t
                .nodes
                .iter()
                .map(|(line, id)| index(*line, id))
                .collect::<Result<Vec<_>, _>>()?;
            let edges = t
                .edges
                .iter()
                .map(|(line, c, p)| Ok((index(*line, c)?, index(*line, p)?)))
                .collect::<Result<Vec<_>, ParseError>>()?;
            Ok(TreeBlock {
                name: t.name.clone(),
                candidate: TreeCandidate { nodes, edges },
            })
        })
        .collect::<Result<Vec<_>, ParseError>>()?;

    let plan = match alts {
        None if choices.is_empty() => None,
        None => return Err(syntax(choices[0].0, "`choose` without an `alts` line")),
        Some((_, alternatives)) => {
            let mut pairs = Vec::new();
            for (line, x, a) in &choices {
                let alt = alternatives
                    .iter()
                    .position(|b| b == a)
                    .ok_or_else(|| ParseError::UnknownAlternative {
                        line: *line,
                        id: a.clone(),
                    })?;
                pairs.push((index(*line, x)?, alt));
            }
            Some(Plan::from_pairs(alternatives, names.len(), &pairs)?)
        }
    };

    let structure = EStructure::new(names, root_index, &gens)?;
    Ok(Document { structure, trees, plan })
}

/// Prints `doc` so that [`parse`] gives it back. Pairs are the covering
/// pairs of the closed relation, not the original generators.
pub fn print(doc: &Document) -> String {
    let s = &doc.structure;
    let mut out = String::new();
    for x in s.states() {
        let kw = if x == s.root() { "root" } else { "state" };
        writeln!(out, "{kw} {}", s.name(x)).unwrap();
    }
    for (x, y) in s.covering_pairs() {
        writeln!(out, "pair {} {}", s.name(x), s.name(y)).unwrap();
    }
    for t in &doc.trees {
        match &t.name {
            Some(name) => writeln!(out, "tree {name} {{").unwrap(),
            None => out.push_str("tree {\n"),
        }
        let nodes: Vec<&str> = t.candidate.nodes.iter().map(|&x| s.name(x)).collect();
        if !nodes.is_empty() {
            writeln!(out, "  node {}", nodes.join(" ")).unwrap();
        }
        for &(c, p) in &t.candidate.edges {
            writeln!(out, "  edge {} {}", s.name(c), s.name(p)).unwrap();
        }
        out.push_str("}\n");
    }
    if let Some(p) = &doc.plan {
        writeln!(out, "alts {}", p.alternatives().join(" ")).unwrap();
        for x in p.domain() {
            let a = p.choice(x).expect("domain state");
            writeln!(out, "choose {} {}", s.name(x), p.alternatives()[a]).unwrap();
        }
    }
    out
}
