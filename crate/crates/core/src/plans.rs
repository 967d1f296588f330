//! Plans, conditional preference relations, and ISD consistency.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::estructure::{derive_relations, EStructure};
use crate::Error;

/// A plan ζ: a partial map from states to alternatives. `choice[x]` is
/// `None` off the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    alternatives: Vec<String>,
    choice: Vec<Option<usize>>,
}

impl Plan {
    pub fn new(alternatives: Vec<String>, choice: Vec<Option<usize>>) -> Result<Self, Error> {
        if alternatives.len() < 2 {
            return Err(Error::InvalidPlan("at least two alternatives required".into()));
        }
        for (i, a) in alternatives.iter().enumerate() {
            if alternatives[..i].contains(a) {
                return Err(Error::InvalidPlan(alloc::format!("duplicate alternative {a}")));
            }
        }
        if let Some(&bad) = choice.iter().flatten().find(|&&a| a >= alternatives.len()) {
            return Err(Error::InvalidPlan(alloc::format!("unknown alternative index {bad}")));
        }
        if choice.iter().all(Option::is_none) {
            return Err(Error::InvalidPlan("empty domain".into()));
        }
        Ok(Plan { alternatives, choice })
    }

    /// Builds a plan from `(state, alternative)` pairs over `n` states.
    pub fn from_pairs(alternatives: Vec<String>, n: usize, pairs: &[(usize, usize)]) -> Result<Self, Error> {
        let mut choice = vec![None; n];
        for &(x, a) in pairs {
            if x >= n {
                return Err(Error::UnknownState(x));
            }
            match choice[x] {
                Some(b) if b != a => {
                    return Err(Error::InvalidPlan(alloc::format!("state {x} has two choices")));
                }
                _ => choice[x] = Some(a),
            }
        }
        Plan::new(alternatives, choice)
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn alternative_count(&self) -> usize {
        self.alternatives.len()
    }

    pub fn alternative_index(&self, name: &str) -> Option<usize> {
        self.alternatives.iter().position(|a| a == name)
    }

    pub fn choice(&self, x: usize) -> Option<usize> {
        self.choice.get(x).copied().flatten()
    }

    pub fn choices(&self) -> &[Option<usize>] {
        &self.choice
    }

    pub fn in_domain(&self, x: usize) -> bool {
        self.choice(x).is_some()
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.choice.len()).filter(|&x| self.in_domain(x))
    }

    /// Fails unless the plan covers exactly the states of `s`.
    pub fn check_against(&self, s: &EStructure) -> Result<(), Error> {
        if self.choice.len() != s.len() {
            return Err(Error::InvalidPlan(alloc::format!(
                "plan covers {} states, structure has {}",
                self.choice.len(),
                s.len()
            )));
        }
        Ok(())
    }
}

/// Per-state weak orders on alternatives. `levels[x][a]` is the level of
/// `a` at `x`; higher is better, equal levels are indifferent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionalPreferenceRelation {
    pub levels: Vec<Vec<u32>>,
}

impl ConditionalPreferenceRelation {
    pub fn indifferent(states: usize, alternatives: usize) -> Self {
        ConditionalPreferenceRelation {
            levels: vec![vec![0; alternatives]; states],
        }
    }

    /// `a ≺_x b`.
    pub fn strictly_prefers(&self, x: usize, b: usize, a: usize) -> bool {
        self.levels[x][a] < self.levels[x][b]
    }

    pub fn alternative_count(&self) -> usize {
        self.levels.first().map_or(0, Vec::len)
    }

    /// At every domain state the planned alternative is strictly best.
    pub fn rationalizes(&self, p: &Plan) -> bool {
        p.domain().all(|x| {
            let c = p.choice(x).expect("domain state");
            (0..self.alternative_count()).all(|a| a == c || self.strictly_prefers(x, c, a))
        })
    }
}

/// A point where ISD fails: every immediate refinement of `state` favours
/// `preferred` (over `over`, for relations) but `state` does not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsdViolation {
    pub state: usize,
    pub preferred: usize,
    pub over: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IsdReport {
    pub violations: Vec<IsdViolation>,
}

impl IsdReport {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// States whose immediate refinements all lie in the domain, count as
/// constraints only when they do; a partially covered set imposes nothing.
pub fn check_isd_plan(s: &EStructure, p: &Plan) -> IsdReport {
    let d = derive_relations(s);
    let mut violations = Vec::new();
    for z in p.domain().filter(|&z| z < s.len()) {
        let ys = &d.immediate[z];
        let Some(&first) = ys.first() else { continue };
        let Some(a) = p.choice(first) else { continue };
        if ys.iter().all(|&x| p.choice(x) == Some(a)) && p.choice(z) != Some(a) {
            violations.push(IsdViolation {
                state: z,
                preferred: a,
                over: None,
            });
        }
    }
    IsdReport { violations }
}

pub fn check_isd_relation(s: &EStructure, r: &ConditionalPreferenceRelation) -> IsdReport {
    let d = derive_relations(s);
    let k = r.alternative_count();
    let mut violations = Vec::new();
    for z in s.states() {
        let ys = &d.immediate[z];
        if ys.is_empty() {
            continue;
        }
        for b in 0..k {
            for a in (0..k).filter(|&a| a != b) {
                if ys.iter().all(|&x| r.strictly_prefers(x, b, a)) && !r.strictly_prefers(z, b, a) {
                    violations.push(IsdViolation {
                        state: z,
                        preferred: b,
                        over: Some(a),
                    });
                }
            }
        }
    }
    IsdReport { violations }
}

/// The planned alternative strictly on top, everything else tied below;
/// full indifference off the domain.
pub fn prop_b_relation(s: &EStructure, p: &Plan) -> ConditionalPreferenceRelation {
    let mut r = ConditionalPreferenceRelation::indifferent(s.len(), p.alternative_count());
    for x in p.domain().filter(|&x| x < s.len()) {
        r.levels[x][p.choice(x).expect("domain state")] = 1;
    }
    r
}
