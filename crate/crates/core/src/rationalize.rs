//! Rationalizing ISD-consistent tree plans with a purely atomic measure,
//! and checking any finite rationalization exactly.
//!
//! Sample points are pairs `(atom, state)`. For each node `x` and each
//! alternative `a ≠ ζ(x)` a branch through `x` is chosen along which no
//! node at or below `x` picks `a`; the point `(leaf atom, x)` "avoids" `a`
//! at `x`. Points get weights `2·3^{-k}` in an order that puts deeper
//! states later, so each point outweighs everything strictly below it, and
//! the weights are rescaled to sum to one.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};

use crate::estructure::EStructure;
use crate::plans::{check_isd_plan, IsdReport, IsdViolation, Plan};
use crate::trees::{Branch, ExperimentationTree};
use crate::{Error, Rational};

/// A branch through `x` on which every node at or below `x` avoids `a`.
///
/// Walks the parent chain up to the root, then descends from `x` through
/// the first child (in declaration order) that does not pick `a`. For an
/// ISD-consistent plan such a child always exists.
pub fn lemma_z_branch(t: &ExperimentationTree, plan: &Plan, x: usize, a: usize) -> Result<Branch, Error> {
    if plan.choice(x) == Some(a) {
        return Err(Error::NothingToAvoid { state: x, alternative: a });
    }
    let mut nodes = t.path_from_root(x);
    let mut cur = x;
    while !t.is_leaf(cur) {
        match t.children(cur).iter().copied().find(|&c| plan.choice(c) != Some(a)) {
            Some(c) => {
                nodes.push(c);
                cur = c;
            }
            None => {
                return Err(Error::NotIsdConsistent(IsdReport {
                    violations: vec![IsdViolation {
                        state: cur,
                        preferred: a,
                        over: None,
                    }],
                }))
            }
        }
    }
    Ok(Branch {
        nodes,
        atom: t.leaf_atom(cur),
    })
}

/// A sample point: a canonical atom of the tree and a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub atom: usize,
    pub state: usize,
}

/// Output of [`construct_sceu`]. Point `k` (0-based) has index `k + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rationalization {
    pub points: Vec<Point>,
    /// Final weights, summing to one.
    pub weights: Vec<Rational>,
    /// `2·3^{-k}` before rescaling.
    pub prenormalized: Vec<Rational>,
    /// `utilities[b][k]` is `f_b` at point `k`, either 0 or 1.
    pub utilities: Vec<Vec<bool>>,
    /// `avoid[x][a]`: point index avoiding `a` at `x`, `None` iff `ζ(x) = a`.
    pub avoid: Vec<Vec<Option<usize>>>,
    /// `events[x]`: points whose atom lies under `x`.
    pub events: Vec<BTreeSet<usize>>,
    /// Mass `3^{-N}` left over by the finite point set before rescaling.
    pub slack: Rational,
}

/// Builds the atomic rationalization of a total, ISD-consistent plan on a
/// tree. `plan` is indexed by the tree's own nodes.
pub fn construct_sceu(t: &ExperimentationTree, plan: &Plan) -> Result<Rationalization, Error> {
    let n = t.len();
    plan.check_against(t.structure())?;
    if plan.domain().count() != n {
        return Err(Error::InvalidPlan("tree plans must cover every node".into()));
    }
    let report = check_isd_plan(t.structure(), plan);
    if !report.consistent() {
        return Err(Error::NotIsdConsistent(report));
    }
    let k = plan.alternative_count();

    let mut raw = vec![vec![None; k]; n];
    let mut set = BTreeSet::new();
    for (x, slots) in raw.iter_mut().enumerate() {
        for a in (0..k).filter(|&a| plan.choice(x) != Some(a)) {
            let branch = lemma_z_branch(t, plan, x, a)?;
            let p = Point { atom: branch.atom, state: x };
            slots[a] = Some(p);
            set.insert(p);
        }
    }
    let mut points: Vec<Point> = set.into_iter().collect();
    points.sort_by_key(|p| (t.rank(p.state), p.state, p.atom));
    let position = |p: Point| points.iter().position(|&q| q == p).expect("collected point");
    let avoid: Vec<Vec<Option<usize>>> = raw
        .iter()
        .map(|row| row.iter().map(|p| p.map(position)).collect())
        .collect();

    let count = points.len();
    let three = BigInt::from(3);
    let total = Pow::pow(&three, count);
    let prenormalized: Vec<Rational> = (1..=count)
        .map(|i| Rational::new(BigInt::from(2), Pow::pow(&three, i)))
        .collect();
    let weights: Vec<Rational> = (1..=count)
        .map(|i| Rational::new(BigInt::from(2) * Pow::pow(&three, count - i), &total - BigInt::one()))
        .collect();
    let slack = Rational::new(BigInt::one(), total);

    let utilities = (0..k)
        .map(|b| points.iter().map(|&p| chooses_below_on_branch(t, plan, p, b)).collect())
        .collect();
    let events = (0..n)
        .map(|x| (0..count).filter(|&i| t.event(x).contains(&points[i].atom)).collect())
        .collect();

    Ok(Rationalization {
        points,
        weights,
        prenormalized,
        utilities,
        avoid,
        events,
        slack,
    })
}

/// Whether some node at or below `p.state`, on the branch of `p.atom`,
/// picks `b`.
fn chooses_below_on_branch(t: &ExperimentationTree, plan: &Plan, p: Point, b: usize) -> bool {
    let leaf = t.space().atoms[p.atom][0];
    let path = t.path_from_root(leaf);
    let start = path.iter().position(|&y| y == p.state).expect("atom lies under the state");
    path[start..].iter().any(|&y| plan.choice(y) == Some(b))
}

impl Rationalization {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn explicit(&self) -> ExplicitRationalization {
        let as_rational = |v: bool| if v { Rational::one() } else { Rational::zero() };
        ExplicitRationalization {
            weights: self.weights.clone(),
            events: self.events.clone(),
            utilities: self
                .utilities
                .iter()
                .map(|row| row.iter().map(|&v| as_rational(v)).collect())
                .collect(),
        }
    }

    pub fn total_mass(&self) -> Rational {
        sum(self.weights.iter())
    }

    /// Pairs of point indices `(i, j)` where `j`'s state lies strictly below
    /// `i`'s but `j` is not indexed later.
    pub fn ordering_violations(&self, t: &ExperimentationTree) -> Vec<(usize, usize)> {
        let s = t.structure();
        let mut out = Vec::new();
        for (i, p) in self.points.iter().enumerate() {
            for (j, q) in self.points.iter().enumerate() {
                if s.sms(q.state, p.state) && j <= i {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Points whose weight does not strictly exceed the total weight of the
    /// points at strictly deeper states.
    pub fn dominance_violations(&self, t: &ExperimentationTree) -> Vec<usize> {
        let s = t.structure();
        (0..self.len())
            .filter(|&i| {
                let below = sum(
                    (0..self.len())
                        .filter(|&j| s.sms(self.points[j].state, self.points[i].state))
                        .map(|j| &self.weights[j]),
                );
                below >= self.weights[i]
            })
            .collect()
    }

    /// For each `(x, a)` with `a ≠ ζ(x)`: the lower bound
    /// `p(avoid(x, a)) − Σ_{χ strictly below x} p(χ)` on the margin.
    pub fn margin_bounds(&self, t: &ExperimentationTree) -> Vec<(usize, usize, Rational)> {
        let s = t.structure();
        let mut out = Vec::new();
        for (x, row) in self.avoid.iter().enumerate() {
            for (a, slot) in row.iter().enumerate() {
                let Some(i) = slot else { continue };
                let below = sum(
                    (0..self.len())
                        .filter(|&j| s.sms(self.points[j].state, x))
                        .map(|j| &self.weights[j]),
                );
                out.push((x, a, &self.weights[*i] - below));
            }
        }
        out
    }
}

fn sum<'a>(it: impl Iterator<Item = &'a Rational>) -> Rational {
    it.fold(Rational::zero(), |acc, v| acc + v)
}

/// A finite, purely atomic candidate representation: point weights, the
/// points making up each state's event, and `utilities[a][point]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitRationalization {
    pub weights: Vec<Rational>,
    pub events: Vec<BTreeSet<usize>>,
    pub utilities: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Margin {
    pub state: usize,
    pub chosen: usize,
    pub rival: usize,
    pub margin: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub margins: Vec<Margin>,
    pub min_margin: Option<Rational>,
    /// Every margin is strictly positive.
    pub satisfied: bool,
    /// Every state's event has positive probability.
    pub events_positive: bool,
    pub total_mass: Rational,
    pub mass_is_one: bool,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Margin> {
        self.margins.iter().filter(|m| !m.margin.is_positive())
    }
}

/// Checks the strict expected-utility inequalities of `plan` under `r`,
/// with exact atomic sums. The verdict does not depend on the total mass,
/// which is reported separately.
pub fn verify_rationalization(
    s: &EStructure,
    plan: &Plan,
    r: &ExplicitRationalization,
) -> Result<VerificationReport, Error> {
    plan.check_against(s)?;
    let n = r.weights.len();
    if r.events.len() != s.len() {
        return Err(Error::Malformed("one event per state expected".into()));
    }
    if r.utilities.len() != plan.alternative_count() || r.utilities.iter().any(|row| row.len() != n) {
        return Err(Error::Malformed("utility table must be alternatives × points".into()));
    }
    if r.events.iter().flatten().any(|&i| i >= n) {
        return Err(Error::Malformed("event refers to an unknown point".into()));
    }
    if r.weights.iter().any(Signed::is_negative) {
        return Err(Error::Malformed("negative weight".into()));
    }
    let integral = |x: usize, a: usize| sum_products(&r.events[x], &r.weights, &r.utilities[a]);
    let mut margins = Vec::new();
    for x in plan.domain() {
        let chosen = plan.choice(x).expect("domain state");
        let top = integral(x, chosen);
        for rival in (0..plan.alternative_count()).filter(|&a| a != chosen) {
            margins.push(Margin {
                state: x,
                chosen,
                rival,
                margin: &top - integral(x, rival),
            });
        }
    }
    let min_margin = margins.iter().map(|m| m.margin.clone()).min();
    let satisfied = margins.iter().all(|m| m.margin.is_positive());
    let events_positive = r
        .events
        .iter()
        .all(|e| sum(e.iter().map(|&i| &r.weights[i])).is_positive());
    let total_mass = sum(r.weights.iter());
    let mass_is_one = total_mass.is_one();
    Ok(VerificationReport {
        margins,
        min_margin,
        satisfied,
        events_positive,
        total_mass,
        mass_is_one,
    })
}

fn sum_products(event: &BTreeSet<usize>, weights: &[Rational], utility: &[Rational]) -> Rational {
    event
        .iter()
        .map(|&i| &weights[i] * &utility[i])
        .fold(Rational::zero(), |acc, v| acc + v)
}

/// Re-indexes an ambient plan onto the nodes of `t`.
pub fn restrict_plan(t: &ExperimentationTree, plan: &Plan) -> Result<Plan, Error> {
    let choice = (0..t.len()).map(|x| plan.choice(t.ambient(x))).collect();
    Plan::new(plan.alternatives().to_vec(), choice)
}
