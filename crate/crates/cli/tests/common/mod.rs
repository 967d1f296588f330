//! Test-side oracles. Everything here is computed from the closed `wms`
//! matrix alone; none of the library's derived relations, spaces, trees or
//! solvers are consulted.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};
use std::path::PathBuf;

use evidential_core::{EStructure, Plan};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).expect("fixture")
}

/// Relations recomputed from `wms` by their definitions.
pub struct Ambient {
    pub n: usize,
    pub root: usize,
    wms: Vec<Vec<bool>>,
}

impl Ambient {
    pub fn new(s: &EStructure) -> Self {
        let n = s.len();
        let wms = (0..n).map(|x| (0..n).map(|y| s.wms(x, y)).collect()).collect();
        Ambient { n, root: s.root(), wms }
    }

    pub fn wms(&self, x: usize, y: usize) -> bool {
        self.wms[x][y]
    }

    pub fn sms(&self, x: usize, y: usize) -> bool {
        self.wms[x][y] && !self.wms[y][x]
    }

    pub fn immms(&self, x: usize, y: usize) -> bool {
        self.sms(x, y) && !(0..self.n).any(|w| self.sms(x, w) && self.sms(w, y))
    }

    pub fn incompat(&self, x: usize, y: usize) -> bool {
        !(0..self.n).any(|v| self.wms[v][x] && self.wms[v][y])
    }

    pub fn maximal(&self, x: usize) -> bool {
        !(0..self.n).any(|y| self.sms(y, x))
    }

    /// Breadth-first distance to the root along immediate steps.
    pub fn ranks(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[self.root] = Some(0);
        let mut queue = VecDeque::from([self.root]);
        while let Some(z) = queue.pop_front() {
            let d = dist[z].unwrap();
            for (x, slot) in dist.iter_mut().enumerate() {
                if slot.is_none() && self.immms(x, z) {
                    *slot = Some(d + 1);
                    queue.push_back(x);
                }
            }
        }
        dist
    }

    /// Equivalence classes of maximal states, in order of their least member.
    pub fn atoms(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for m in (0..self.n).filter(|&m| self.maximal(m)) {
            match out.iter_mut().find(|c| self.wms[c[0]][m] && self.wms[m][c[0]]) {
                Some(c) => c.push(m),
                None => out.push(vec![m]),
            }
        }
        out
    }

    /// Atoms (indices into [`Ambient::atoms`]) refining `x`.
    pub fn event(&self, atoms: &[Vec<usize>], x: usize) -> BTreeSet<usize> {
        (0..atoms.len()).filter(|&i| self.wms[atoms[i][0]][x]).collect()
    }
}

/// Rows `coeffs · v >= rhs` over exact rationals.
type Row = (Vec<BigRational>, BigRational);

fn normalize(row: Row) -> Row {
    let (c, r) = row;
    match c.iter().find(|v| !v.is_zero()) {
        Some(lead) => {
            let scale = lead.abs();
            (c.iter().map(|v| v / &scale).collect(), r / scale)
        }
        None => (c, r),
    }
}

/// Fourier–Motzkin elimination on the system "for each state `x` in the
/// domain and each rival `b`, the chosen alternative's utility summed
/// over `e(x)` beats `b`'s by at least one". Alternative 0 is pinned at
/// zero on every atom, which loses nothing since adding a common term per
/// atom leaves all differences unchanged.
pub fn fm_feasible(s: &EStructure, plan: &Plan) -> bool {
    let amb = Ambient::new(s);
    let atoms = amb.atoms();
    let m = atoms.len();
    let k = plan.alternative_count();
    let vars = (k - 1) * m;
    let var = |a: usize, j: usize| (a > 0).then(|| (a - 1) * m + j);

    let mut rows: BTreeSet<Row> = BTreeSet::new();
    for x in plan.domain() {
        let c = plan.choice(x).unwrap();
        let e = amb.event(&atoms, x);
        for b in (0..k).filter(|&b| b != c) {
            let mut coeffs = vec![BigRational::zero(); vars];
            for &j in &e {
                if let Some(v) = var(c, j) {
                    coeffs[v] += BigRational::one();
                }
                if let Some(v) = var(b, j) {
                    coeffs[v] -= BigRational::one();
                }
            }
            rows.insert(normalize((coeffs, BigRational::one())));
        }
    }

    let mut live: Vec<usize> = (0..vars).collect();
    loop {
        let mut kept = BTreeSet::new();
        for row in rows {
            if row.0.iter().all(Zero::is_zero) {
                if row.1.is_positive() {
                    return false;
                }
            } else {
                kept.insert(row);
            }
        }
        rows = kept;
        if live.is_empty() || rows.is_empty() {
            return true;
        }
        // Eliminate the variable producing the fewest new rows.
        let cost = |v: usize| {
            let p = rows.iter().filter(|r| r.0[v].is_positive()).count();
            let q = rows.iter().filter(|r| r.0[v].is_negative()).count();
            p * q
        };
        let (pos, &v) = live.iter().enumerate().min_by_key(|(_, &v)| cost(v)).unwrap();
        live.swap_remove(pos);
        let (mut up, mut down, mut rest) = (Vec::new(), Vec::new(), BTreeSet::new());
        for row in rows {
            if row.0[v].is_positive() {
                up.push(row);
            } else if row.0[v].is_negative() {
                down.push(row);
            } else {
                rest.insert(row);
            }
        }
        for (pc, pr) in &up {
            for (nc, nr) in &down {
                let (a, b) = (pc[v].abs(), nc[v].abs());
                let coeffs: Vec<BigRational> = pc.iter().zip(nc).map(|(p, q)| p * &b + q * &a).collect();
                let rhs = pr * &b + nr * &a;
                rest.insert(normalize((coeffs, rhs)));
            }
        }
        rows = rest;
    }
}

/// Labels of the tree conditions violated by `nodes` with the order
/// generated by `edges` (child, parent), read directly off the definitions.
pub fn tree_violations(amb: &Ambient, nodes: &[usize], edges: &[(usize, usize)]) -> BTreeSet<&'static str> {
    let mut out = BTreeSet::new();
    let t: Vec<usize> = nodes.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let n = t.len();
    let pos = |x: usize| t.iter().position(|&y| y == x).unwrap();

    // Reflexive-transitive closure of the edges on T.
    let mut wmt = vec![vec![false; n]; n];
    for (i, row) in wmt.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(c, p) in edges {
        wmt[pos(c)][pos(p)] = true;
    }
    for w in 0..n {
        for i in 0..n {
            for j in 0..n {
                if wmt[i][w] && wmt[w][j] {
                    wmt[i][j] = true;
                }
            }
        }
    }
    let smt = |i: usize, j: usize| wmt[i][j] && !wmt[j][i];
    let immmt = |i: usize, j: usize| smt(i, j) && !(0..n).any(|w| smt(i, w) && smt(w, j));
    let maximal = |i: usize| !(0..n).any(|w| smt(w, i));
    let children = |i: usize| (0..n).filter(|&c| immmt(c, i)).collect::<Vec<_>>();

    if !t.contains(&amb.root) || n < 2 {
        out.insert("t-noth");
    }
    if (0..n).any(|i| (0..n).any(|j| wmt[i][j] && !amb.wms(t[i], t[j]))) {
        out.insert("t-po");
    }
    if (0..n).any(|i| t[i] != amb.root && (0..n).filter(|&j| immmt(i, j)).count() != 1) {
        out.insert("t-tree");
    }
    if (0..n).any(|i| (0..n).any(|j| immmt(i, j) && !amb.immms(t[i], t[j]))) {
        out.insert("t-immed");
    }
    for i in (0..n).filter(|&i| !maximal(i)) {
        let kids = children(i);
        if kids.len() < 2 {
            out.insert("t-fork");
        }
        for &y in &kids {
            for &z in &kids {
                if y != z && !amb.incompat(t[y], t[z]) {
                    out.insert("t-incompat");
                }
            }
        }
        for z in (0..amb.n).filter(|&z| amb.sms(z, t[i])) {
            let found = (0..amb.n).any(|v| amb.wms(v, z) && kids.iter().any(|&w| amb.wms(v, t[w])));
            if !found {
                out.insert("t-unbiased");
            }
        }
    }
    out
}

/// A tree as (sorted nodes, sorted child-parent edges).
pub type TreeKey = (Vec<usize>, Vec<(usize, usize)>);

/// Every tree whose order is generated by a parent map, found by trying
/// all node sets containing the root and all assignments of a strictly
/// less specific parent inside the set.
pub fn brute_force_trees(s: &EStructure) -> BTreeSet<TreeKey> {
    let amb = Ambient::new(s);
    let others: Vec<usize> = (0..amb.n).filter(|&x| x != amb.root).collect();
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << others.len()) {
        let mut nodes = vec![amb.root];
        nodes.extend((0..others.len()).filter(|&i| mask >> i & 1 == 1).map(|i| others[i]));
        nodes.sort_unstable();
        let members: Vec<usize> = nodes.iter().copied().filter(|&x| x != amb.root).collect();
        let options: Vec<Vec<usize>> = members
            .iter()
            .map(|&x| nodes.iter().copied().filter(|&p| amb.sms(x, p)).collect())
            .collect();
        if options.iter().any(Vec::is_empty) {
            continue;
        }
        let mut pick = vec![0usize; members.len()];
        loop {
            let mut edges: Vec<(usize, usize)> = (0..members.len()).map(|i| (members[i], options[i][pick[i]])).collect();
            edges.sort_unstable();
            if tree_violations(&amb, &nodes, &edges).is_empty() {
                out.insert((nodes.clone(), edges));
            }
            let mut i = 0;
            while i < pick.len() {
                pick[i] += 1;
                if pick[i] < options[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == pick.len() {
                break;
            }
        }
    }
    out
}

pub fn tree_key(t: &evidential_core::ExperimentationTree) -> TreeKey {
    let c = t.candidate();
    let mut nodes = c.nodes;
    nodes.sort_unstable();
    let mut edges = c.edges;
    edges.sort_unstable();
    (nodes, edges)
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
