//! Exact decision procedure for rationalizability of a plan.
//!
//! Writing `g[a][m] = p(m)·f_a(m)` over canonical atoms `m` turns the
//! expected-utility inequalities into the linear system
//!
//! ```text
//! Σ_{m ∈ e(x)} (g[ζ(x)][m] − g[a][m]) ≥ 1      x in the domain, a ≠ ζ(x)
//! ```
//!
//! which is homogeneous, so margin 1 loses nothing. The system is decided
//! through its Farkas alternative `{y ≥ 0, Aᵀy = 0, Σy = 1}` with a
//! phase-one simplex over big rationals. A feasible alternative is an
//! infeasibility certificate; otherwise the final duals give `g`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::canonical::{build_canonical, CanonicalSpace};
use crate::estructure::EStructure;
use crate::plans::Plan;
use crate::{AtomSet, Error, Rational};

/// `Σ_{m ∈ atoms} (g[chosen][m] − g[rival][m]) ≥ 1`, for domain state `state`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub state: usize,
    pub chosen: usize,
    pub rival: usize,
    pub atoms: AtomSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilitySystem {
    pub alternatives: usize,
    pub atoms: usize,
    pub rows: Vec<Constraint>,
}

impl FeasibilitySystem {
    pub fn build(space: &CanonicalSpace, plan: &Plan) -> Self {
        let k = plan.alternative_count();
        let mut rows = Vec::new();
        for x in plan.domain() {
            let chosen = plan.choice(x).expect("domain state");
            for rival in (0..k).filter(|&a| a != chosen) {
                rows.push(Constraint {
                    state: x,
                    chosen,
                    rival,
                    atoms: space.event(x).clone(),
                });
            }
        }
        FeasibilitySystem {
            alternatives: k,
            atoms: space.atom_count(),
            rows,
        }
    }

    /// Coefficient of `g[alt][atom]` in row `r`.
    pub fn coefficient(&self, r: usize, alt: usize, atom: usize) -> i32 {
        let row = &self.rows[r];
        if !row.atoms.contains(&atom) {
            0
        } else if alt == row.chosen {
            1
        } else if alt == row.rival {
            -1
        } else {
            0
        }
    }

    /// Left-hand side of row `r` at `g`.
    pub fn lhs(&self, r: usize, g: &[Vec<Rational>]) -> Rational {
        let row = &self.rows[r];
        row.atoms
            .iter()
            .map(|&m| &g[row.chosen][m] - &g[row.rival][m])
            .fold(Rational::zero(), |acc, v| acc + v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityResult {
    /// `g` solves the system; `weights` are uniform and
    /// `utilities[a][m] = g[a][m] / weights[m]`.
    Feasible {
        g: Vec<Vec<Rational>>,
        weights: Vec<Rational>,
        utilities: Vec<Vec<Rational>>,
    },
    /// Nonnegative integer multipliers, one per row, whose combination of
    /// the rows cancels every variable while the right-hand sides sum to a
    /// positive constant.
    Infeasible { multipliers: Vec<Rational> },
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub space: CanonicalSpace,
    pub system: FeasibilitySystem,
    pub result: FeasibilityResult,
}

pub fn decide_rationalizable(s: &EStructure, plan: &Plan) -> Result<Decision, Error> {
    plan.check_against(s)?;
    let space = build_canonical(s)?;
    let system = FeasibilitySystem::build(&space, plan);
    let result = solve(&system);
    Ok(Decision { space, system, result })
}

/// Decides `system` exactly.
pub fn solve(system: &FeasibilitySystem) -> FeasibilityResult {
    let (k, n) = (system.alternatives, system.atoms);
    let m = system.rows.len();
    // Adding h(atom) to every alternative leaves each row unchanged, so the
    // columns of alternative 0 can be fixed at zero.
    let columns: Vec<(usize, usize)> = (1..k).flat_map(|a| (0..n).map(move |j| (a, j))).collect();
    let e = columns.len() + 1;

    // Equality rows: one per column of Aᵀ, then Σy = 1.
    let mut a = vec![vec![Rational::zero(); m]; e];
    for (row, &(alt, atom)) in a.iter_mut().zip(&columns) {
        for (r, v) in row.iter_mut().enumerate() {
            *v = Rational::from_integer(system.coefficient(r, alt, atom).into());
        }
    }
    a[e - 1].fill(Rational::one());
    let mut b = vec![Rational::zero(); e];
    b[e - 1] = Rational::one();

    let outcome = Tableau::phase_one(a, b).run();
    if outcome.objective.is_zero() {
        FeasibilityResult::Infeasible {
            multipliers: integral(&outcome.primal[..m]),
        }
    } else {
        let t = &outcome.duals[e - 1];
        let mut g = vec![vec![Rational::zero(); n]; k];
        for (i, &(alt, atom)) in columns.iter().enumerate() {
            g[alt][atom] = -&outcome.duals[i] / t;
        }
        let weight = Rational::new(BigInt::one(), BigInt::from(n.max(1)));
        let utilities = g
            .iter()
            .map(|row| row.iter().map(|v| v / &weight).collect())
            .collect();
        FeasibilityResult::Feasible {
            g,
            weights: vec![weight; n],
            utilities,
        }
    }
}

/// Rescales a nonnegative rational vector to coprime integers.
fn integral(v: &[Rational]) -> Vec<Rational> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let gcd = if gcd.is_zero() { BigInt::one() } else { gcd };
    ints.into_iter().map(|x| Rational::from_integer(x / &gcd)).collect()
}

struct Outcome {
    objective: Rational,
    primal: Vec<Rational>,
    duals: Vec<Rational>,
}

/// Dense tableau for `min Σ art  s.t.  [A | I](x, art) = b, x, art ≥ 0`,
/// with `b ≥ 0`, pivoted under Bland's rule.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    cost: Vec<Rational>,
    basis: Vec<usize>,
    structural: usize,
}

impl Tableau {
    fn phase_one(a: Vec<Vec<Rational>>, rhs: Vec<Rational>) -> Self {
        let e = a.len();
        let structural = a.first().map_or(0, Vec::len);
        let width = structural + e;
        let rows: Vec<Vec<Rational>> = a
            .into_iter()
            .enumerate()
            .map(|(i, mut row)| {
                row.resize(width, Rational::zero());
                row[structural + i] = Rational::one();
                row
            })
            .collect();
        // Reduced costs with the artificial basis: c_j − Σ_i a_ij.
        let mut cost = vec![Rational::zero(); width];
        for (j, c) in cost.iter_mut().enumerate() {
            if j >= structural {
                continue;
            }
            for row in &rows {
                *c -= &row[j];
            }
        }
        Tableau {
            rows,
            rhs,
            cost,
            basis: (structural..width).collect(),
            structural,
        }
    }

    fn run(mut self) -> Outcome {
        while let Some(col) = self.cost.iter().position(Signed::is_negative) {
            let mut leave: Option<usize> = None;
            let mut best = Rational::zero();
            for (i, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &row[col];
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best || (ratio == best && self.basis[i] < self.basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
            // Phase one is bounded below by zero.
            let leave = leave.expect("phase-one objective is bounded");
            self.pivot(leave, col);
        }
        let e = self.rows.len();
        let mut primal = vec![Rational::zero(); self.structural + e];
        for (i, &v) in self.basis.iter().enumerate() {
            primal[v] = self.rhs[i].clone();
        }
        let objective = primal[self.structural..].iter().fold(Rational::zero(), |acc, v| acc + v);
        let duals = (0..e)
            .map(|i| Rational::one() - &self.cost[self.structural + i])
            .collect();
        Outcome {
            objective,
            primal,
            duals,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        self.rhs[r] /= &p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }
}

/// Re-checks a result against `system` with exact arithmetic.
///
/// A feasible result must satisfy every row with margin at least one, have
/// positive weights, and reproduce `g` as weight × utility. An infeasible
/// result must be nonnegative, cancel every variable, and leave a positive
/// constant. Dimension mismatches are errors, not `false`.
pub fn verify_certificate(system: &FeasibilitySystem, result: &FeasibilityResult) -> Result<bool, Error> {
    let (k, n) = (system.alternatives, system.atoms);
    match result {
        FeasibilityResult::Feasible { g, weights, utilities } => {
            let shaped = |t: &Vec<Vec<Rational>>| t.len() == k && t.iter().all(|row| row.len() == n);
            if !shaped(g) || !shaped(utilities) || weights.len() != n {
                return Err(Error::Mismatch("witness dimensions differ from the system".into()));
            }
            if weights.iter().any(|w| !w.is_positive()) {
                return Ok(false);
            }
            let consistent = (0..k).all(|a| (0..n).all(|m| g[a][m] == &weights[m] * &utilities[a][m]));
            let rows_hold = (0..system.rows.len()).all(|r| system.lhs(r, g) >= Rational::one());
            Ok(consistent && rows_hold)
        }
        FeasibilityResult::Infeasible { multipliers } => {
            if multipliers.len() != system.rows.len() {
                return Err(Error::Mismatch("one multiplier per row expected".into()));
            }
            if multipliers.iter().any(Signed::is_negative) {
                return Ok(false);
            }
            let cancels = (0..k).all(|a| {
                (0..n).all(|m| {
                    multipliers
                        .iter()
                        .enumerate()
                        .map(|(r, y)| y * Rational::from_integer(system.coefficient(r, a, m).into()))
                        .fold(Rational::zero(), |acc, v| acc + v)
                        .is_zero()
                })
            });
            let constant = multipliers.iter().fold(Rational::zero(), |acc, y| acc + y);
            Ok(cancels && constant.is_positive())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plans::tests::{example_r, example_t};
    use alloc::string::ToString;

    #[test]
    fn example_r_is_feasible() {
        let (s, p) = example_r();
        let d = decide_rationalizable(&s, &p).unwrap();
        assert!(d.result.is_feasible());
        assert_eq!(verify_certificate(&d.system, &d.result), Ok(true));
    }

    #[test]
    fn example_t_is_infeasible() {
        let (s, p) = example_t();
        let d = decide_rationalizable(&s, &p).unwrap();
        let FeasibilityResult::Infeasible { multipliers } = &d.result else {
            panic!("expected infeasible");
        };
        assert_eq!(verify_certificate(&d.system, &d.result), Ok(true));
        // A basic solution: no strict subset of its rows is a certificate.
        let support: Vec<usize> = (0..multipliers.len()).filter(|&r| !multipliers[r].is_zero()).collect();
        assert!(support.len() <= 4);
    }

    #[test]
    fn four_row_combination_for_example_t() {
        // b over c at x1 and z2, c over b at x2 and z1: the four events
        // cover the space twice over with opposite signs.
        let (s, p) = example_t();
        let d = decide_rationalizable(&s, &p).unwrap();
        let i = |n| s.index_of(n).unwrap();
        let picked = [(i("x1"), 1, 2), (i("x2"), 2, 1), (i("z1"), 2, 1), (i("z2"), 1, 2)];
        let multipliers = d
            .system
            .rows
            .iter()
            .map(|r| {
                let hit = picked.contains(&(r.state, r.chosen, r.rival));
                if hit { Rational::one() } else { Rational::zero() }
            })
            .collect();
        let certificate = FeasibilityResult::Infeasible { multipliers };
        assert_eq!(verify_certificate(&d.system, &certificate), Ok(true));
    }

    #[test]
    fn root_only_plan_is_feasible() {
        let (s, _) = example_t();
        let p = Plan::from_pairs(vec!["a".to_string(), "b".to_string()], s.len(), &[(0, 1)]).unwrap();
        let d = decide_rationalizable(&s, &p).unwrap();
        assert!(d.result.is_feasible());
        assert_eq!(verify_certificate(&d.system, &d.result), Ok(true));
    }

    #[test]
    fn tampered_witness_is_rejected() {
        let (s, p) = example_r();
        let d = decide_rationalizable(&s, &p).unwrap();
        let FeasibilityResult::Feasible { mut g, weights, mut utilities } = d.result.clone() else {
            panic!("expected feasible");
        };
        let root_row = &d.system.rows[0];
        let m = *root_row.atoms.iter().next().unwrap();
        // Push the rival far above the chosen alternative on one atom.
        let big = Rational::from_integer(BigInt::from(1000));
        g[root_row.rival][m] = &g[root_row.rival][m] + &big;
        utilities[root_row.rival][m] = &g[root_row.rival][m] / &weights[m];
        let tampered = FeasibilityResult::Feasible { g, weights, utilities };
        assert_eq!(verify_certificate(&d.system, &tampered), Ok(false));
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let (s, p) = example_t();
        let d = decide_rationalizable(&s, &p).unwrap();
        let FeasibilityResult::Infeasible { mut multipliers } = d.result.clone() else {
            panic!("expected infeasible");
        };
        let first = multipliers.iter().position(|y| !y.is_zero()).unwrap();
        multipliers[first] = -multipliers[first].clone();
        let bad = FeasibilityResult::Infeasible { multipliers };
        assert_eq!(verify_certificate(&d.system, &bad), Ok(false));
        let short = FeasibilityResult::Infeasible { multipliers: vec![] };
        assert!(verify_certificate(&d.system, &short).is_err());
    }

    #[test]
    fn scaling_preserves_feasibility() {
        let (s, p) = example_r();
        let d = decide_rationalizable(&s, &p).unwrap();
        let FeasibilityResult::Feasible { g, .. } = &d.result else { panic!() };
        let c = Rational::new(BigInt::from(7), BigInt::from(3));
        let scaled: Vec<Vec<Rational>> = g.iter().map(|row| row.iter().map(|v| v * &c).collect()).collect();
        assert!((0..d.system.rows.len()).all(|r| d.system.lhs(r, &scaled) >= Rational::one()));
    }
}
