//! Evidential structures: a finite set of e-states ordered by specificity.
//!
//! `x ⪰ y` ("x is weakly more specific than y") is stored as a closed dense
//! relation. Everything else (strict part, equivalence, immediate
//! specificity, incompatibility) is derived from it.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::relation::Relation;
use crate::Error;

/// A finite evidential structure.
///
/// States are identified by their position in declaration order; names are
/// opaque labels kept for reporting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EStructure {
    names: Vec<String>,
    root: usize,
    wms: Relation,
}

impl EStructure {
    /// Builds a structure whose specificity preorder is the reflexive,
    /// transitive closure of `generators`. A generator `(x, y)` reads
    /// "x is more specific than y".
    pub fn new(names: Vec<String>, root: usize, generators: &[(usize, usize)]) -> Result<Self, Error> {
        let n = names.len();
        if n < 2 {
            return Err(Error::TooFewStates);
        }
        if root >= n {
            return Err(Error::UnknownState(root));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::DuplicateState(name.clone()));
            }
        }
        let mut rel = Relation::empty(n);
        for &(x, y) in generators {
            if x >= n {
                return Err(Error::UnknownState(x));
            }
            if y >= n {
                return Err(Error::UnknownState(y));
            }
            rel.set(x, y, true);
        }
        Ok(EStructure {
            names,
            root,
            wms: rel.reflexive_transitive_closure(),
        })
    }

    /// Builds a structure from a full relation matrix, closing it first.
    pub fn from_relation(names: Vec<String>, root: usize, wms: &Relation) -> Result<Self, Error> {
        if wms.len() != names.len() {
            return Err(Error::UnknownState(wms.len()));
        }
        let pairs: Vec<_> = wms.pairs().collect();
        Self::new(names, root, &pairs)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn states(&self) -> core::ops::Range<usize> {
        0..self.names.len()
    }

    /// The closed specificity relation.
    pub fn relation(&self) -> &Relation {
        &self.wms
    }

    #[inline]
    pub fn wms(&self, x: usize, y: usize) -> bool {
        self.wms.get(x, y)
    }

    #[inline]
    pub fn sms(&self, x: usize, y: usize) -> bool {
        self.wms.get(x, y) && !self.wms.get(y, x)
    }

    #[inline]
    pub fn eqs(&self, x: usize, y: usize) -> bool {
        self.wms.get(x, y) && self.wms.get(y, x)
    }

    /// No state is weakly more specific than both.
    pub fn incompat(&self, x: usize, y: usize) -> bool {
        !self.states().any(|z| self.wms(z, x) && self.wms(z, y))
    }

    /// `x` is strictly more specific than `z` with nothing strictly between.
    pub fn immms(&self, x: usize, z: usize) -> bool {
        self.sms(x, z) && !self.states().any(|y| self.sms(x, y) && self.sms(y, z))
    }

    /// States immediately more specific than `z`, in declaration order.
    pub fn immediate(&self, z: usize) -> Vec<usize> {
        self.states().filter(|&x| self.immms(x, z)).collect()
    }

    /// States with no strictly more specific state.
    pub fn is_maximally_specific(&self, x: usize) -> bool {
        !self.states().any(|y| self.sms(y, x))
    }

    /// Pairs of the covering relation (immediate steps plus equivalences),
    /// whose closure is the whole preorder.
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        let d = derive_relations(self);
        let mut out = Vec::new();
        for x in self.states() {
            for y in self.states() {
                if x != y && (d.immms.get(x, y) || d.eqs.get(x, y)) {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

/// Relations derived from `⪰`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedRelations {
    pub sms: Relation,
    pub eqs: Relation,
    pub immms: Relation,
    pub incompat: Relation,
    /// `immediate[z]` lists every `x` with `x ⋖ z`.
    pub immediate: Vec<Vec<usize>>,
}

pub fn derive_relations(s: &EStructure) -> DerivedRelations {
    let n = s.len();
    let mut sms = Relation::empty(n);
    let mut eqs = Relation::empty(n);
    for x in 0..n {
        for y in 0..n {
            sms.set(x, y, s.sms(x, y));
            eqs.set(x, y, s.eqs(x, y));
        }
    }
    let mut immms = Relation::empty(n);
    for x in 0..n {
        for z in 0..n {
            if sms.get(x, z) && !(0..n).any(|y| sms.get(x, y) && sms.get(y, z)) {
                immms.set(x, z, true);
            }
        }
    }
    let mut incompat = Relation::empty(n);
    for x in 0..n {
        for y in 0..n {
            let common = (0..n).any(|z| s.wms(z, x) && s.wms(z, y));
            incompat.set(x, y, !common);
        }
    }
    let immediate = (0..n).map(|z| immms.predecessors(z).collect()).collect();
    DerivedRelations {
        sms,
        eqs,
        immms,
        incompat,
        immediate,
    }
}

/// The five defining conditions of an e-structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    /// (1) preorder with well-founded converse.
    WellFoundedPreorder,
    /// (2) every other state is strictly more specific than the root.
    Root,
    /// (3) every strict step starts with an immediate one.
    ImmediateStep,
    /// (4) finitely many immediate refinements.
    FiniteBranching,
    /// (5) non-refinement is witnessed by an incompatible refinement.
    Separation,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [
        Axiom::WellFoundedPreorder,
        Axiom::Root,
        Axiom::ImmediateStep,
        Axiom::FiniteBranching,
        Axiom::Separation,
    ];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }
}

/// A finite witness for a failed axiom. Indices are states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomWitness {
    NotReflexive(usize),
    NotTransitive(usize, usize, usize),
    /// A strict cycle `x0 ≻ x1 ≻ … ≻ x0`.
    StrictCycle(Vec<usize>),
    /// `x ≠ root` but not `x ≻ root`.
    NotBelowRoot(usize),
    /// `x ≻ z` but no `y` with `x ⋖ y ⪰ z`.
    NoImmediateStep { x: usize, z: usize },
    /// Not `x ⪰ z`, yet every refinement of `x` is compatible with `z`.
    NoSeparatingRefinement { x: usize, z: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub witness: Option<AxiomWitness>,
}

impl AxiomResult {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    /// True iff the structure is an e-structure.
    pub fn passes(&self) -> bool {
        self.results.iter().all(AxiomResult::passed)
    }

    pub fn failed(&self) -> Vec<Axiom> {
        self.results.iter().filter(|r| !r.passed()).map(|r| r.axiom).collect()
    }

    pub fn result(&self, axiom: Axiom) -> &AxiomResult {
        &self.results[axiom as usize]
    }
}

/// Checks axioms (1)–(5). On a finite carrier well-foundedness of `≺⁻¹`
/// reduces to acyclicity of the strict part.
pub fn check_axioms(s: &EStructure) -> AxiomReport {
    let d = derive_relations(s);
    let results = Axiom::ALL
        .iter()
        .map(|&axiom| {
            let witness = match axiom {
                Axiom::WellFoundedPreorder => preorder_witness(s, &d),
                Axiom::Root => s
                    .states()
                    .find(|&x| x != s.root && !s.sms(x, s.root))
                    .map(AxiomWitness::NotBelowRoot),
                Axiom::ImmediateStep => immediate_step_witness(s, &d),
                // Finite carrier: every Y(z) is finite.
                Axiom::FiniteBranching => None,
                Axiom::Separation => separation_witness(s, &d),
            };
            AxiomResult { axiom, witness }
        })
        .collect();
    AxiomReport { results }
}

fn preorder_witness(s: &EStructure, d: &DerivedRelations) -> Option<AxiomWitness> {
    let r = s.relation();
    if let Some(x) = s.states().find(|&x| !r.get(x, x)) {
        return Some(AxiomWitness::NotReflexive(x));
    }
    if let Some((x, y, z)) = r.transitivity_witness() {
        return Some(AxiomWitness::NotTransitive(x, y, z));
    }
    strict_cycle(&d.sms).map(AxiomWitness::StrictCycle)
}

fn strict_cycle(sms: &Relation) -> Option<Vec<usize>> {
    // Colour-marking DFS over the strict relation.
    let n = sms.len();
    let mut colour = vec![0u8; n];
    let mut stack: Vec<usize> = Vec::new();
    fn visit(v: usize, sms: &Relation, colour: &mut [u8], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
        colour[v] = 1;
        stack.push(v);
        for w in sms.successors(v) {
            if colour[w] == 1 {
                let start = stack.iter().position(|&u| u == w).unwrap_or(0);
                return Some(stack[start..].to_vec());
            }
            if colour[w] == 0 {
                if let Some(c) = visit(w, sms, colour, stack) {
                    return Some(c);
                }
            }
        }
        stack.pop();
        colour[v] = 2;
        None
    }
    for v in 0..n {
        if colour[v] == 0 {
            if let Some(c) = visit(v, sms, &mut colour, &mut stack) {
                return Some(c);
            }
        }
    }
    None
}

fn immediate_step_witness(s: &EStructure, d: &DerivedRelations) -> Option<AxiomWitness> {
    for x in s.states() {
        for z in s.states() {
            if d.sms.get(x, z) && !s.states().any(|y| d.immms.get(x, y) && s.wms(y, z)) {
                return Some(AxiomWitness::NoImmediateStep { x, z });
            }
        }
    }
    None
}

fn separation_witness(s: &EStructure, d: &DerivedRelations) -> Option<AxiomWitness> {
    for x in s.states() {
        for z in s.states() {
            if !s.wms(x, z) && !s.states().any(|y| s.wms(y, x) && d.incompat.get(y, z)) {
                return Some(AxiomWitness::NoSeparatingRefinement { x, z });
            }
        }
    }
    None
}

/// Rank of every state: the length of a shortest chain of immediate steps
/// down to the root, with one such chain per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankTable {
    pub rank: Vec<usize>,
    /// `chains[x]` runs `x ⋖ … ⋖ root`; its length is `rank[x] + 1`.
    pub chains: Vec<Vec<usize>>,
}

impl RankTable {
    pub fn max_rank(&self) -> usize {
        self.rank.iter().copied().max().unwrap_or(0)
    }
}

pub fn rank(s: &EStructure) -> Result<RankTable, Error> {
    let report = check_axioms(s);
    if !report.passes() {
        return Err(Error::AxiomsFailed(report));
    }
    let d = derive_relations(s);
    Ok(rank_unchecked(s, &d))
}

/// Breadth-first search up the immediate-specificity edges from the root.
pub(crate) fn rank_unchecked(s: &EStructure, d: &DerivedRelations) -> RankTable {
    let n = s.len();
    let mut rank = vec![usize::MAX; n];
    let mut next = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    rank[s.root] = 0;
    queue.push_back(s.root);
    while let Some(y) = queue.pop_front() {
        for &x in &d.immediate[y] {
            if rank[x] == usize::MAX {
                rank[x] = rank[y] + 1;
                next[x] = y;
                queue.push_back(x);
            }
        }
    }
    let chains = (0..n)
        .map(|x| {
            let mut chain = vec![x];
            let mut cur = x;
            while cur != s.root && next[cur] != usize::MAX {
                cur = next[cur];
                chain.push(cur);
            }
            chain
        })
        .collect();
    RankTable { rank, chains }
}

/// `{x | ρ(x) ≤ n}` in declaration order.
pub fn rank_level_sets(ranks: &RankTable, n: usize) -> Vec<usize> {
    (0..ranks.rank.len()).filter(|&x| ranks.rank[x] <= n).collect()
}
