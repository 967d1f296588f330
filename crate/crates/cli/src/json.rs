//! JSON renderings of every command result. Rationals are `"num/den"`
//! strings; state and alternative ids are used instead of indices.

use std::collections::{BTreeMap, BTreeSet};

use evidential_core::canonical::{EmbeddingFailure, TheoremGFailure, TheoremGReport};
use evidential_core::estructure::{AxiomReport, AxiomWitness, RankTable};
use evidential_core::lp::{Decision, FeasibilityResult};
use evidential_core::plans::IsdReport;
use evidential_core::rationalize::{ExplicitRationalization, Rationalization, VerificationReport};
use evidential_core::trees::{ExperimentationTree, TreeReport};
use evidential_core::{CanonicalSpace, EStructure, Plan, Rational};
use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::{json, Value};

/// `"n/d"`, or `"n"` for integers.
pub fn rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Accepts `"n/d"` or `"n"`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (text.trim().parse::<BigInt>().ok()?, BigInt::from(1)),
    };
    if d == BigInt::from(0) {
        return None;
    }
    Some(Rational::new(n, d))
}

fn names(s: &EStructure, xs: impl IntoIterator<Item = usize>) -> Vec<String> {
    xs.into_iter().map(|x| s.name(x).to_string()).collect()
}

/// An atom is named by its member states, joined with `=` when several
/// equivalent maximal states share it.
pub fn atom_label(s: &EStructure, c: &CanonicalSpace, atom: usize) -> String {
    names(s, c.atoms[atom].iter().copied()).join("=")
}

pub fn echo(s: &EStructure) -> Value {
    let wms: Vec<Vec<bool>> = s.relation().rows();
    json!({
        "states": s.names(),
        "root": s.name(s.root()),
        "wms": wms,
    })
}

fn axiom_witness(s: &EStructure, w: &AxiomWitness) -> Value {
    let n = |x: usize| s.name(x).to_string();
    match w {
        AxiomWitness::NotReflexive(x) => json!({"kind": "not-reflexive", "states": [n(*x)]}),
        AxiomWitness::NotTransitive(x, y, z) => {
            json!({"kind": "not-transitive", "states": [n(*x), n(*y), n(*z)]})
        }
        AxiomWitness::StrictCycle(c) => json!({"kind": "strict-cycle", "states": names(s, c.iter().copied())}),
        AxiomWitness::NotBelowRoot(x) => json!({"kind": "not-below-root", "states": [n(*x)]}),
        AxiomWitness::NoImmediateStep { x, z } => json!({"kind": "no-immediate-step", "states": [n(*x), n(*z)]}),
        AxiomWitness::NoSeparatingRefinement { x, z } => {
            json!({"kind": "no-separating-refinement", "states": [n(*x), n(*z)]})
        }
    }
}

pub fn axioms(s: &EStructure, report: &AxiomReport) -> Value {
    let results: Vec<Value> = report
        .results
        .iter()
        .map(|r| {
            json!({
                "axiom": r.axiom.number(),
                "holds": r.passed(),
                "witness": r.witness.as_ref().map(|w| axiom_witness(s, w)),
            })
        })
        .collect();
    json!({"holds": report.passes(), "axioms": results})
}

pub fn rank(s: &EStructure, r: &RankTable) -> Value {
    let ranks: BTreeMap<&str, usize> = s.states().map(|x| (s.name(x), r.rank[x])).collect();
    let chains: BTreeMap<&str, Vec<String>> = s
        .states()
        .map(|x| (s.name(x), names(s, r.chains[x].iter().copied())))
        .collect();
    json!({"rank": ranks, "chains": chains})
}

pub fn canonical(s: &EStructure, c: &CanonicalSpace, g: &TheoremGReport) -> Value {
    let atoms: Vec<Vec<String>> = c.atoms.iter().map(|a| names(s, a.iter().copied())).collect();
    let events: BTreeMap<&str, Vec<String>> = s
        .states()
        .map(|x| (s.name(x), c.event(x).iter().map(|&m| atom_label(s, c, m)).collect()))
        .collect();
    let failures: Vec<Value> = g.failures.iter().map(|f| theorem_g_failure(s, c, f)).collect();
    json!({
        "atoms": atoms,
        "events": events,
        "verified": g.passes(),
        "failures": failures,
    })
}

fn theorem_g_failure(s: &EStructure, c: &CanonicalSpace, f: &TheoremGFailure) -> Value {
    let n = |x: &usize| s.name(*x).to_string();
    let labels = |set: &BTreeSet<usize>| set.iter().map(|&m| atom_label(s, c, m)).collect::<Vec<_>>();
    match f {
        TheoremGFailure::Top => json!({"kind": "top"}),
        TheoremGFailure::EmptyEvent(x) => json!({"kind": "empty-event", "states": [n(x)]}),
        TheoremGFailure::Monotone { x, y } => json!({"kind": "monotone", "states": [n(x), n(y)]}),
        TheoremGFailure::Disjoint { x, y } => json!({"kind": "disjoint", "states": [n(x), n(y)]}),
        TheoremGFailure::Base(a) => json!({"kind": "base", "atoms": labels(a)}),
        TheoremGFailure::Principal(a) => json!({"kind": "principal", "atoms": labels(a)}),
    }
}

pub fn embedding_failure(s: &EStructure, f: &EmbeddingFailure) -> Value {
    let n = |x: &usize| s.name(*x).to_string();
    match f {
        EmbeddingFailure::RootNotFull => json!({"kind": "root-not-full"}),
        EmbeddingFailure::EmptyImage(x) => json!({"kind": "empty-image", "states": [n(x)]}),
        EmbeddingFailure::Order { x, y } => json!({"kind": "order", "states": [n(x), n(y)]}),
        EmbeddingFailure::Overlap { x, y } => json!({"kind": "overlap", "states": [n(x), n(y)]}),
        EmbeddingFailure::Saturation(x) => json!({"kind": "saturation", "states": [n(x)]}),
    }
}

pub fn tree(s: &EStructure, t: &ExperimentationTree) -> Value {
    let c = t.candidate();
    let edges: Vec<[&str; 2]> = c.edges.iter().map(|&(a, b)| [s.name(a), s.name(b)]).collect();
    json!({"nodes": names(s, c.nodes.iter().copied()), "edges": edges})
}

pub fn tree_report(s: &EStructure, name: Option<&str>, report: &TreeReport) -> Value {
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| {
            let witness: Vec<String> = v
                .witness
                .iter()
                .map(|&x| s.names().get(x).cloned().unwrap_or_else(|| format!("#{x}")))
                .collect();
            json!({"condition": v.condition.label(), "witness": witness})
        })
        .collect();
    let failed: Vec<&str> = report.failed_conditions().iter().map(|c| c.label()).collect();
    json!({
        "name": name,
        "holds": report.passes(),
        "failed": failed,
        "violations": violations,
    })
}

pub fn isd(s: &EStructure, p: &Plan, report: &IsdReport) -> Value {
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| {
            json!({
                "state": s.name(v.state),
                "alternative": p.alternatives()[v.preferred],
            })
        })
        .collect();
    json!({"consistent": report.consistent(), "violations": violations})
}

pub fn decision(s: &EStructure, p: &Plan, d: &Decision) -> Value {
    let c = &d.space;
    let label = |m: usize| atom_label(s, c, m);
    match &d.result {
        FeasibilityResult::Feasible { weights, utilities, .. } => {
            let w: BTreeMap<String, String> = weights.iter().enumerate().map(|(m, v)| (label(m), rational(v))).collect();
            let u: BTreeMap<&str, BTreeMap<String, String>> = utilities
                .iter()
                .enumerate()
                .map(|(a, row)| {
                    let row = row.iter().enumerate().map(|(m, v)| (label(m), rational(v))).collect();
                    (p.alternatives()[a].as_str(), row)
                })
                .collect();
            json!({"feasible": true, "weights": w, "utilities": u})
        }
        FeasibilityResult::Infeasible { multipliers } => {
            let cert: Vec<Value> = d
                .system
                .rows
                .iter()
                .zip(multipliers)
                .filter(|(_, y)| *y != &Rational::from_integer(0.into()))
                .map(|(r, y)| {
                    json!({
                        "state": s.name(r.state),
                        "chosen": p.alternatives()[r.chosen],
                        "rival": p.alternatives()[r.rival],
                        "multiplier": rational(y),
                    })
                })
                .collect();
            json!({"feasible": false, "certificate": cert})
        }
    }
}

/// The tree-local rationalization, with states named in the ambient
/// structure so the output can be fed back to `verify`.
pub fn rationalization(
    t: &ExperimentationTree,
    p: &Plan,
    r: &Rationalization,
    report: &VerificationReport,
) -> Value {
    let s = t.structure();
    let c = t.space();
    let points: Vec<Value> = r
        .points
        .iter()
        .map(|pt| json!({"atom": names(s, c.atoms[pt.atom].iter().copied()).join("="), "state": s.name(pt.state)}))
        .collect();
    let utilities: BTreeMap<&str, Vec<u8>> = r
        .utilities
        .iter()
        .enumerate()
        .map(|(a, row)| (p.alternatives()[a].as_str(), row.iter().map(|&b| u8::from(b)).collect()))
        .collect();
    let events: BTreeMap<&str, Vec<usize>> = (0..t.len())
        .map(|x| (s.name(x), r.events[x].iter().copied().collect()))
        .collect();
    json!({
        "points": points,
        "weights": r.weights.iter().map(rational).collect::<Vec<_>>(),
        "prenormalized": r.prenormalized.iter().map(rational).collect::<Vec<_>>(),
        "slack": rational(&r.slack),
        "utilities": utilities,
        "events": events,
        "verification": verification(s, p, report),
        "ordering_holds": r.ordering_violations(t).is_empty(),
        "dominance_holds": r.dominance_violations(t).is_empty(),
    })
}

pub fn verification(s: &EStructure, p: &Plan, v: &VerificationReport) -> Value {
    let failures: Vec<Value> = v
        .failures()
        .map(|m| {
            json!({
                "state": s.name(m.state),
                "chosen": p.alternatives()[m.chosen],
                "rival": p.alternatives()[m.rival],
                "margin": rational(&m.margin),
            })
        })
        .collect();
    json!({
        "satisfied": v.satisfied,
        "min_margin": v.min_margin.as_ref().map(rational),
        "events_positive": v.events_positive,
        "total_mass": rational(&v.total_mass),
        "mass_is_one": v.mass_is_one,
        "failures": failures,
    })
}

/// The parts of a rationalization document that `verify` reads. Extra
/// fields are ignored, so `plan rationalize` output is accepted as is.
#[derive(Debug, Deserialize)]
pub struct RationalizationInput {
    pub weights: Vec<String>,
    pub utilities: BTreeMap<String, Vec<Value>>,
    pub events: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum InputError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("`{0}` is not a rational")]
    Rational(String),
    #[error("unknown state `{0}`")]
    State(String),
    #[error("unknown alternative `{0}`")]
    Alternative(String),
    #[error("no utilities for alternative `{0}`")]
    MissingAlternative(String),
}

/// Reads a rationalization document against `s` and `p`. Returns the
/// explicit table (events of unlisted states are empty) and the plan cut
/// down to the listed states.
pub fn read_rationalization(
    text: &str,
    s: &EStructure,
    p: &Plan,
) -> Result<(ExplicitRationalization, Plan), InputError> {
    let input: RationalizationInput = serde_json::from_str(text).map_err(|e| InputError::Json(e.to_string()))?;
    let weights = input
        .weights
        .iter()
        .map(|w| parse_rational(w).ok_or_else(|| InputError::Rational(w.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let mut events = vec![BTreeSet::new(); s.len()];
    let mut listed = vec![false; s.len()];
    for (name, pts) in &input.events {
        let x = s.index_of(name).ok_or_else(|| InputError::State(name.clone()))?;
        events[x] = pts.iter().copied().collect();
        listed[x] = true;
    }
    for a in input.utilities.keys() {
        if p.alternative_index(a).is_none() {
            return Err(InputError::Alternative(a.clone()));
        }
    }
    let mut utilities = Vec::new();
    for a in p.alternatives() {
        let row = input
            .utilities
            .get(a)
            .ok_or_else(|| InputError::MissingAlternative(a.clone()))?;
        let row = row
            .iter()
            .map(|v| {
                let text = match v {
                    Value::String(t) => t.clone(),
                    other => other.to_string(),
                };
                parse_rational(&text).ok_or(InputError::Rational(text))
            })
            .collect::<Result<Vec<_>, _>>()?;
        utilities.push(row);
    }
    let choice = s.states().map(|x| if listed[x] { p.choice(x) } else { None }).collect();
    let restricted = Plan::new(p.alternatives().to_vec(), choice)
        .map_err(|_| InputError::State("no listed state is in the plan's domain".into()))?;
    Ok((ExplicitRationalization { weights, events, utilities }, restricted))
}
