//! Experimentation trees inside an e-structure.
//!
//! A candidate is a node subset plus parent edges; the tree order is the
//! reflexive, transitive closure of those edges. Once a candidate passes
//! [`check_tree`] it becomes an [`ExperimentationTree`], which is also an
//! e-structure in its own right. Partitions, branches, and field
//! decompositions are computed against that structure's canonical space,
//! whose atoms are the tree's leaves.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::canonical::{build_canonical, CanonicalSpace};
use crate::estructure::{check_axioms, derive_relations, rank_unchecked, AxiomReport, EStructure, RankTable};
use crate::relation::Relation;
use crate::{AtomSet, Error};

/// Nodes and `(child, parent)` edges, both as ambient state indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeCandidate {
    pub nodes: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

/// The seven defining conditions of an experimentation tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TreeCondition {
    Noth,
    Po,
    Tree,
    Immed,
    Fork,
    Incompat,
    Unbiased,
}

impl TreeCondition {
    pub const ALL: [TreeCondition; 7] = [
        TreeCondition::Noth,
        TreeCondition::Po,
        TreeCondition::Tree,
        TreeCondition::Immed,
        TreeCondition::Fork,
        TreeCondition::Incompat,
        TreeCondition::Unbiased,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TreeCondition::Noth => "t-noth",
            TreeCondition::Po => "t-po",
            TreeCondition::Tree => "t-tree",
            TreeCondition::Immed => "t-immed",
            TreeCondition::Fork => "t-fork",
            TreeCondition::Incompat => "t-incompat",
            TreeCondition::Unbiased => "t-unbiased",
        }
    }
}

/// One violated condition. The witness lists ambient states:
///
/// - `t-noth`: the nodes;
/// - `t-po`: `[x, y]` with `x ⪰* y` but not `x ⪰ y`;
/// - `t-tree`: `[x, parents…]`;
/// - `t-immed`: `[x, y]` with `x ⋖* y` but not `x ⋖ y`;
/// - `t-fork`: `[x, children…]`;
/// - `t-incompat`: `[x, y, z]` with compatible children `y`, `z` of `x`;
/// - `t-unbiased`: `[x, z]` where no child of `x` is compatible with `z ≻ x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeViolation {
    pub condition: TreeCondition,
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeReport {
    pub violations: Vec<TreeViolation>,
}

impl TreeReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn failed_conditions(&self) -> BTreeSet<TreeCondition> {
        self.violations.iter().map(|v| v.condition).collect()
    }
}

struct LocalTree {
    nodes: Vec<usize>,
    wmt: Relation,
}

impl LocalTree {
    fn smt(&self, i: usize, j: usize) -> bool {
        self.wmt.get(i, j) && !self.wmt.get(j, i)
    }

    fn immmt(&self, i: usize, j: usize) -> bool {
        self.smt(i, j) && !(0..self.nodes.len()).any(|k| self.smt(i, k) && self.smt(k, j))
    }

    fn maximal(&self, i: usize) -> bool {
        !(0..self.nodes.len()).any(|w| self.smt(w, i))
    }

    fn children(&self, i: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&c| self.immmt(c, i)).collect()
    }

    fn parents(&self, i: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&p| self.immmt(i, p)).collect()
    }
}

pub fn check_tree(s: &EStructure, candidate: &TreeCandidate) -> TreeReport {
    use TreeCondition::*;
    let mut violations = Vec::new();
    let mut push = |condition, witness: Vec<usize>| violations.push(TreeViolation { condition, witness });

    let mut nodes: Vec<usize> = Vec::new();
    for &x in &candidate.nodes {
        if x >= s.len() {
            push(Po, vec![x]);
        } else if !nodes.contains(&x) {
            nodes.push(x);
        }
    }
    nodes.sort_unstable();
    let local = |x: usize| nodes.iter().position(|&n| n == x);

    if !nodes.contains(&s.root()) || nodes.len() < 2 {
        push(Noth, nodes.clone());
    }

    let mut edges = Relation::empty(nodes.len());
    for &(c, p) in &candidate.edges {
        match (local(c), local(p)) {
            (Some(i), Some(j)) => edges.set(i, j, true),
            _ => push(Po, vec![c, p]),
        }
    }
    let t = LocalTree {
        wmt: edges.reflexive_transitive_closure(),
        nodes: nodes.clone(),
    };
    let n = nodes.len();
    let amb = |i: usize| nodes[i];

    for i in 0..n {
        for j in 0..n {
            if i != j && t.wmt.get(i, j) && !s.wms(amb(i), amb(j)) {
                push(Po, vec![amb(i), amb(j)]);
            }
        }
    }
    for i in 0..n {
        if amb(i) == s.root() {
            continue;
        }
        let parents = t.parents(i);
        if parents.len() != 1 {
            let mut w = vec![amb(i)];
            w.extend(parents.iter().map(|&p| amb(p)));
            push(Tree, w);
        }
    }
    for i in 0..n {
        for j in 0..n {
            if t.immmt(i, j) && !s.immms(amb(i), amb(j)) {
                push(Immed, vec![amb(i), amb(j)]);
            }
        }
    }
    let d = derive_relations(s);
    for i in 0..n {
        if t.maximal(i) {
            continue;
        }
        let children = t.children(i);
        if children.len() < 2 {
            let mut w = vec![amb(i)];
            w.extend(children.iter().map(|&c| amb(c)));
            push(Fork, w);
        }
        for (a, &y) in children.iter().enumerate() {
            for &z in &children[a + 1..] {
                if !d.incompat.get(amb(y), amb(z)) {
                    push(Incompat, vec![amb(i), amb(y), amb(z)]);
                }
            }
        }
        // Some v refines both z and a child w  ⇔  z and w are compatible.
        for z in s.states() {
            if d.sms.get(z, amb(i)) && children.iter().all(|&w| d.incompat.get(z, amb(w))) {
                push(Unbiased, vec![amb(i), z]);
            }
        }
    }
    TreeReport { violations }
}

/// A verified experimentation tree, indexed locally in ambient declaration
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentationTree {
    ambient: Vec<usize>,
    structure: EStructure,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    rank: Vec<usize>,
    space: CanonicalSpace,
}

impl ExperimentationTree {
    pub fn new(s: &EStructure, candidate: &TreeCandidate) -> Result<Self, Error> {
        let report = check_tree(s, candidate);
        if !report.passes() {
            return Err(Error::NotATree(report));
        }
        let mut ambient = candidate.nodes.clone();
        ambient.sort_unstable();
        ambient.dedup();
        let local = |x: usize| ambient.iter().position(|&n| n == x).expect("checked node");
        let names = ambient.iter().map(|&x| s.names()[x].clone()).collect();
        let gens: Vec<_> = candidate.edges.iter().map(|&(c, p)| (local(c), local(p))).collect();
        let structure = EStructure::new(names, local(s.root()), &gens)?;
        Ok(Self::from_verified(ambient, structure))
    }

    /// Treats `s` itself as a tree: every state is a node and the parent
    /// edges are the immediate-specificity pairs.
    pub fn from_structure(s: &EStructure) -> Result<Self, Error> {
        let d = derive_relations(s);
        let candidate = TreeCandidate {
            nodes: s.states().collect(),
            edges: d.immms.pairs().collect(),
        };
        Self::new(s, &candidate)
    }

    fn from_verified(ambient: Vec<usize>, structure: EStructure) -> Self {
        let d = derive_relations(&structure);
        let n = structure.len();
        let parent: Vec<Option<usize>> = (0..n).map(|x| d.immms.successors(x).next()).collect();
        let children: Vec<Vec<usize>> = d.immediate.clone();
        let mut rank = vec![0; n];
        let mut queue = VecDeque::from([structure.root()]);
        while let Some(x) = queue.pop_front() {
            for &c in &children[x] {
                rank[c] = rank[x] + 1;
                queue.push_back(c);
            }
        }
        // A verified tree is an e-structure (every tree condition has been
        // checked), so its canonical space exists.
        let space = build_canonical(&structure).expect("experimentation tree is an e-structure");
        ExperimentationTree {
            ambient,
            structure,
            parent,
            children,
            rank,
            space,
        }
    }

    pub fn len(&self) -> usize {
        self.ambient.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ambient.is_empty()
    }

    pub fn root(&self) -> usize {
        self.structure.root()
    }

    /// The tree as an e-structure in itself.
    pub fn structure(&self) -> &EStructure {
        &self.structure
    }

    pub fn name(&self, x: usize) -> &str {
        self.structure.name(x)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.structure.index_of(name)
    }

    /// Ambient index of local node `x`.
    pub fn ambient(&self, x: usize) -> usize {
        self.ambient[x]
    }

    pub fn ambient_nodes(&self) -> &[usize] {
        &self.ambient
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.parent[x]
    }

    pub fn children(&self, x: usize) -> &[usize] {
        &self.children[x]
    }

    /// Tree rank: number of parent steps to the root.
    pub fn rank(&self, x: usize) -> usize {
        self.rank[x]
    }

    pub fn max_rank(&self) -> usize {
        self.rank.iter().copied().max().unwrap_or(0)
    }

    pub fn is_leaf(&self, x: usize) -> bool {
        self.children[x].is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&x| self.is_leaf(x))
    }

    /// Canonical space of the tree in itself; atoms are the leaves.
    pub fn space(&self) -> &CanonicalSpace {
        &self.space
    }

    pub fn event(&self, x: usize) -> &AtomSet {
        self.space.event(x)
    }

    /// Atom of leaf `x`.
    pub fn leaf_atom(&self, x: usize) -> usize {
        self.space.atom_of(x).expect("leaves are atoms")
    }

    /// Nodes from the root down to `x`.
    pub fn path_from_root(&self, x: usize) -> Vec<usize> {
        let mut path = vec![x];
        let mut cur = x;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// The candidate this tree was built from, in ambient indices.
    pub fn candidate(&self) -> TreeCandidate {
        TreeCandidate {
            nodes: self.ambient.clone(),
            edges: (0..self.len())
                .filter_map(|x| self.parent[x].map(|p| (self.ambient[x], self.ambient[p])))
                .collect(),
        }
    }
}

/// Axiom check and rank of a tree seen as an e-structure, with the two rank
/// laws: monotone along the tree order and one step per edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeStructureReport {
    pub axioms: AxiomReport,
    pub ranks: RankTable,
    pub rank_monotone: bool,
    pub rank_unit_steps: bool,
}

impl TreeStructureReport {
    pub fn passes(&self) -> bool {
        self.axioms.passes() && self.rank_monotone && self.rank_unit_steps
    }
}

pub fn tree_as_estructure(t: &ExperimentationTree) -> TreeStructureReport {
    let s = t.structure();
    let axioms = check_axioms(s);
    let ranks = rank_unchecked(s, &derive_relations(s));
    let rank_monotone = s
        .states()
        .all(|x| s.states().all(|y| !s.wms(x, y) || ranks.rank[x] >= ranks.rank[y]));
    let rank_unit_steps = s.states().all(|x| match t.parent(x) {
        Some(p) => ranks.rank[x] == ranks.rank[p] + 1 && ranks.rank[x] == t.rank(x),
        None => ranks.rank[x] == 0,
    });
    TreeStructureReport {
        axioms,
        ranks,
        rank_monotone,
        rank_unit_steps,
    }
}

/// Graph-theoretic shape of a candidate's undirected edge graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphTreeReport {
    pub connected: bool,
    /// A simple undirected cycle, as a node sequence.
    pub cycle: Option<Vec<usize>>,
    /// Distinct `x`, `y` with `x ⪰* y` and `y ⪰* x`.
    pub symmetric_pair: Option<(usize, usize)>,
}

impl GraphTreeReport {
    pub fn passes(&self) -> bool {
        self.connected && self.cycle.is_none() && self.symmetric_pair.is_none()
    }
}

pub fn check_graph_tree(candidate: &TreeCandidate) -> GraphTreeReport {
    let mut nodes = candidate.nodes.clone();
    nodes.sort_unstable();
    nodes.dedup();
    let n = nodes.len();
    let local = |x: usize| nodes.iter().position(|&m| m == x);
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut directed = Relation::empty(n);
    let mut cycle = None;
    for &(c, p) in &candidate.edges {
        let (Some(i), Some(j)) = (local(c), local(p)) else {
            continue;
        };
        directed.set(i, j, true);
        if cycle.is_some() {
            continue;
        }
        if i == j {
            cycle = Some(vec![c]);
            continue;
        }
        if adjacency[i].contains(&j) {
            continue;
        }
        if let Some(path) = undirected_path(&adjacency, i, j) {
            cycle = Some(path.into_iter().map(|k| nodes[k]).collect());
        }
        adjacency[i].push(j);
        adjacency[j].push(i);
    }
    // Cycle detection stops adding edges, so rebuild adjacency in full for
    // the connectivity test.
    let mut full: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j) in directed.pairs() {
        full[i].push(j);
        full[j].push(i);
    }
    let connected = n == 0 || reachable(&full, 0).len() == n;
    let closure = directed.reflexive_transitive_closure();
    let symmetric_pair = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && closure.get(i, j) && closure.get(j, i))
        .map(|(i, j)| (nodes[i], nodes[j]));
    GraphTreeReport {
        connected,
        cycle,
        symmetric_pair,
    }
}

fn reachable(adjacency: &[Vec<usize>], start: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen
}

fn undirected_path(adjacency: &[Vec<usize>], from: usize, to: usize) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; adjacency.len()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[cur];
                path.push(cur);
            }
            return Some(path);
        }
        for &w in &adjacency[v] {
            if prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Enumerates experimentation trees in `s`, in a deterministic order, up to
/// `max_count` of them.
///
/// The search grows trees breadth-first from the root. Each node is either
/// left as a leaf or given a set of at least two pairwise incompatible
/// immediate refinements, and that set must be compatible with every strict
/// refinement of the node. Every emitted tree is re-verified with
/// [`check_tree`]. The search is exponential; full enumeration is meant for
/// structures of a dozen states or so.
pub fn find_trees(s: &EStructure, max_count: Option<usize>) -> Vec<ExperimentationTree> {
    let mut search = Search {
        s,
        d: derive_relations(s),
        nodes: vec![s.root()],
        edges: Vec::new(),
        in_tree: vec![false; s.len()],
        out: Vec::new(),
        max: max_count.unwrap_or(usize::MAX),
    };
    search.in_tree[s.root()] = true;
    if search.max > 0 {
        search.grow(0);
    }
    search.out
}

struct Search<'a> {
    s: &'a EStructure,
    d: crate::estructure::DerivedRelations,
    nodes: Vec<usize>,
    edges: Vec<(usize, usize)>,
    in_tree: Vec<bool>,
    out: Vec<ExperimentationTree>,
    max: usize,
}

impl Search<'_> {
    fn grow(&mut self, pos: usize) {
        if self.out.len() >= self.max {
            return;
        }
        if pos == self.nodes.len() {
            let candidate = TreeCandidate {
                nodes: self.nodes.clone(),
                edges: self.edges.clone(),
            };
            if let Ok(t) = ExperimentationTree::new(self.s, &candidate) {
                self.out.push(t);
            }
            return;
        }
        let z = self.nodes[pos];
        if z != self.s.root() {
            self.grow(pos + 1);
        }
        let options: Vec<usize> = self.d.immediate[z]
            .iter()
            .copied()
            .filter(|&y| !self.in_tree[y])
            .collect();
        let refinements: Vec<usize> = self.s.states().filter(|&q| self.d.sms.get(q, z)).collect();
        for mask in 1u64..(1u64 << options.len().min(63)) {
            if mask.count_ones() < 2 {
                continue;
            }
            let chosen: Vec<usize> = (0..options.len())
                .filter(|&k| mask >> k & 1 == 1)
                .map(|k| options[k])
                .collect();
            let pairwise = chosen
                .iter()
                .enumerate()
                .all(|(a, &y)| chosen[a + 1..].iter().all(|&w| self.d.incompat.get(y, w)));
            if !pairwise {
                continue;
            }
            let unbiased = refinements
                .iter()
                .all(|&q| chosen.iter().any(|&c| !self.d.incompat.get(q, c)));
            if !unbiased {
                continue;
            }
            for &c in &chosen {
                self.in_tree[c] = true;
                self.nodes.push(c);
                self.edges.push((c, z));
            }
            self.grow(pos + 1);
            for &c in &chosen {
                self.in_tree[c] = false;
            }
            let keep = self.nodes.len() - chosen.len();
            self.nodes.truncate(keep);
            self.edges.truncate(self.edges.len() - chosen.len());
            if self.out.len() >= self.max {
                return;
            }
        }
    }
}

/// One block of a partition: a node and its event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub node: usize,
    pub atoms: AtomSet,
}

/// `levels[n]` holds the blocks of the `n`-th partition: events of nodes of
/// rank `n`, plus leaves of smaller rank. Stored up to the maximum rank,
/// after which the sequence is constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSequence {
    pub levels: Vec<Vec<Block>>,
    pub atom_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionViolation {
    NotAPartition(usize),
    NotARefinement(usize),
    /// The last level does not split the space into single atoms, so the
    /// union of the generated fields is not the full power set.
    FieldIncomplete,
}

impl PartitionSequence {
    pub fn level(&self, n: usize) -> Vec<&AtomSet> {
        let n = n.min(self.levels.len() - 1);
        self.levels[n].iter().map(|b| &b.atoms).collect()
    }

    pub fn violations(&self) -> Vec<PartitionViolation> {
        let mut out = Vec::new();
        let all: AtomSet = (0..self.atom_count).collect();
        for (n, level) in self.levels.iter().enumerate() {
            let mut seen = AtomSet::new();
            let mut ok = true;
            for b in level {
                ok &= !b.atoms.is_empty() && b.atoms.is_disjoint(&seen);
                seen.extend(b.atoms.iter().copied());
            }
            if !ok || seen != all {
                out.push(PartitionViolation::NotAPartition(n));
            }
            if n > 0 {
                let coarser = &self.levels[n - 1];
                let refines = level
                    .iter()
                    .all(|b| coarser.iter().any(|c| b.atoms.is_subset(&c.atoms)));
                if !refines {
                    out.push(PartitionViolation::NotARefinement(n));
                }
            }
        }
        match self.levels.last() {
            Some(last) if last.iter().all(|b| b.atoms.len() == 1) => {}
            _ => out.push(PartitionViolation::FieldIncomplete),
        }
        out
    }
}

pub fn partitions(t: &ExperimentationTree) -> PartitionSequence {
    let levels = (0..=t.max_rank())
        .map(|n| {
            (0..t.len())
                .filter(|&x| t.rank(x) == n || (t.rank(x) < n && t.is_leaf(x)))
                .map(|x| Block {
                    node: x,
                    atoms: t.event(x).clone(),
                })
                .collect()
        })
        .collect();
    PartitionSequence {
        levels,
        atom_count: t.space().atom_count(),
    }
}

/// Nodes whose children's events fail to partition the node's event.
pub fn children_partition_violations(t: &ExperimentationTree) -> Vec<usize> {
    (0..t.len())
        .filter(|&z| !t.is_leaf(z))
        .filter(|&z| {
            let mut seen = AtomSet::new();
            let mut ok = true;
            for &c in t.children(z) {
                ok &= !t.event(c).is_empty() && t.event(c).is_disjoint(&seen);
                seen.extend(t.event(c).iter().copied());
            }
            !(ok && seen == *t.event(z))
        })
        .collect()
}

/// Writes a union of atoms as a union of pairwise disjoint node events,
/// taking the shallowest nodes first.
pub fn decompose_field_element(t: &ExperimentationTree, element: &AtomSet) -> Result<Vec<usize>, Error> {
    if !element.is_subset(&t.space().all_atoms()) {
        return Err(Error::NotRepresentable);
    }
    let mut out = Vec::new();
    let mut stack = vec![t.root()];
    while let Some(x) = stack.pop() {
        let e = t.event(x);
        if e.is_subset(element) {
            out.push(x);
        } else if !e.is_disjoint(element) {
            stack.extend(t.children(x).iter().rev().copied());
        }
    }
    let union: AtomSet = out.iter().flat_map(|&x| t.event(x).iter().copied()).collect();
    if union != *element {
        return Err(Error::NotRepresentable);
    }
    Ok(out)
}

/// A root-to-leaf chain and the atom it determines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub nodes: Vec<usize>,
    pub atom: usize,
}

impl Branch {
    pub fn leaf(&self) -> usize {
        *self.nodes.last().expect("branches are nonempty")
    }

    pub fn contains(&self, x: usize) -> bool {
        self.nodes.contains(&x)
    }
}

/// One branch per leaf, in depth-first order.
pub fn branches(t: &ExperimentationTree) -> Vec<Branch> {
    let mut out = Vec::new();
    let mut stack = vec![t.root()];
    while let Some(x) = stack.pop() {
        if t.is_leaf(x) {
            out.push(Branch {
                nodes: t.path_from_root(x),
                atom: t.leaf_atom(x),
            });
        } else {
            stack.extend(t.children(x).iter().rev().copied());
        }
    }
    out
}

/// Intersection of the events along a chain of nodes.
pub fn branch_intersection(t: &ExperimentationTree, nodes: &[usize]) -> AtomSet {
    let mut acc = t.space().all_atoms();
    for &x in nodes {
        acc = acc.intersection(t.event(x)).copied().collect();
    }
    acc
}
