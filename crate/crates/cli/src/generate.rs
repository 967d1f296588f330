//! Seeded random instances for property campaigns.

use evidential_core::{EStructure, ExperimentationTree, Plan};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// States are subsets of a universe of `2..=max_atoms` points, ordered by
/// reverse inclusion: the full set is the root and every singleton is a
/// state. Up to `max_states` states in total; extra subsets may repeat,
/// giving equivalent states. Always an e-structure.
pub fn set_family(rng: &mut impl Rng, max_atoms: usize, max_states: usize) -> EStructure {
    let k = rng.random_range(2..=max_atoms.max(2));
    let full: u32 = (1 << k) - 1;
    let mut sets = vec![full];
    sets.extend((0..k).map(|i| 1u32 << i));
    let room = max_states.saturating_sub(sets.len());
    let extras = rng.random_range(0..=room);
    for _ in 0..extras {
        sets.push(rng.random_range(1..full));
    }
    let names = (0..sets.len()).map(|i| format!("s{i}")).collect();
    let mut gens = Vec::new();
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate() {
            if i != j && a & b == *a {
                gens.push((i, j));
            }
        }
    }
    EStructure::new(names, 0, &gens).expect("at least three states")
}

/// A random tree with at most `max_nodes` nodes, as an e-structure in its
/// own right. Leaves are split into two to four children until the budget
/// runs out. Parents are numbered before their children.
pub fn tree_structure(rng: &mut impl Rng, max_nodes: usize) -> EStructure {
    let mut leaves = vec![0usize];
    let mut edges = Vec::new();
    let mut n = 1;
    let target = rng.random_range(3..=max_nodes.max(3));
    while n + 2 <= target {
        let at = rng.random_range(0..leaves.len());
        let parent = leaves.swap_remove(at);
        let count = rng.random_range(2..=4).min(target - n);
        for _ in 0..count {
            edges.push((n, parent));
            leaves.push(n);
            n += 1;
        }
    }
    let names = (0..n).map(|i| format!("n{i}")).collect();
    EStructure::new(names, 0, &edges).expect("at least three nodes")
}

pub fn tree(rng: &mut impl Rng, max_nodes: usize) -> ExperimentationTree {
    ExperimentationTree::from_structure(&tree_structure(rng, max_nodes)).expect("generated trees are trees")
}

pub fn alternatives(k: usize) -> Vec<String> {
    (0..k).map(|a| ((b'a' + a as u8) as char).to_string()).collect()
}

pub fn choices(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

pub fn total_plan(k: usize, choice: &[usize]) -> Plan {
    Plan::new(alternatives(k), choice.iter().map(|&a| Some(a)).collect()).expect("valid plan")
}

/// Bottom-up repair: a node whose children all agree takes their choice.
pub fn make_isd_consistent(t: &ExperimentationTree, choice: &mut [usize]) {
    for z in (0..t.len()).rev() {
        let kids = t.children(z);
        if let Some(&first) = kids.first() {
            if kids.iter().all(|&c| choice[c] == choice[first]) {
                choice[z] = choice[first];
            }
        }
    }
}

/// Breaks ISD at a random internal node: its children all get one
/// alternative and the node another.
pub fn make_isd_inconsistent(rng: &mut impl Rng, t: &ExperimentationTree, choice: &mut [usize], k: usize) {
    let internal: Vec<usize> = (0..t.len()).filter(|&x| !t.is_leaf(x)).collect();
    let z = *internal.choose(rng).expect("trees have an internal node");
    let a = rng.random_range(0..k);
    for &c in t.children(z) {
        choice[c] = a;
    }
    choice[z] = (a + rng.random_range(1..k)) % k;
}

/// A plan on `n` states with each state in the domain with probability
/// one half; the domain is never empty.
pub fn partial_plan(rng: &mut impl Rng, n: usize, k: usize) -> Plan {
    let mut choice: Vec<Option<usize>> = (0..n)
        .map(|_| rng.random_bool(0.5).then(|| rng.random_range(0..k)))
        .collect();
    if choice.iter().all(Option::is_none) {
        choice[rng.random_range(0..n)] = Some(rng.random_range(0..k));
    }
    Plan::new(alternatives(k), choice).expect("valid plan")
}

#[cfg(test)]
mod tests {
    use super::*;
    use evidential_core::{check_axioms, check_isd_plan};

    #[test]
    fn set_families_are_estructures() {
        let mut r = rng(1);
        for _ in 0..50 {
            let s = set_family(&mut r, 4, 10);
            assert!(s.len() <= 10);
            assert!(check_axioms(&s).passes());
        }
    }

    #[test]
    fn trees_respect_the_budget() {
        let mut r = rng(2);
        for _ in 0..50 {
            let t = tree(&mut r, 40);
            assert!(t.len() <= 40);
        }
    }

    #[test]
    fn plan_repairs() {
        let mut r = rng(3);
        for _ in 0..50 {
            let t = tree(&mut r, 20);
            let k = r.random_range(2..=4);
            let mut c = choices(&mut r, t.len(), k);
            make_isd_consistent(&t, &mut c);
            assert!(check_isd_plan(t.structure(), &total_plan(k, &c)).consistent());
            make_isd_inconsistent(&mut r, &t, &mut c, k);
            assert!(!check_isd_plan(t.structure(), &total_plan(k, &c)).consistent());
        }
    }

    #[test]
    fn same_seed_same_instance() {
        assert_eq!(set_family(&mut rng(9), 4, 10), set_family(&mut rng(9), 4, 10));
        assert_eq!(tree_structure(&mut rng(9), 30), tree_structure(&mut rng(9), 30));
    }
}
