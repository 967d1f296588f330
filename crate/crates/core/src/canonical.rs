//! The finite canonical sample space of an e-structure.
//!
//! Sample points are the equivalence classes of maximally specific
//! e-states, and each e-state `x` is mapped to the atoms lying weakly below
//! it. On a finite carrier the topology is discrete, so compactness and
//! clopen-ness hold trivially and no topology object is built. The
//! remaining conditions (top, monotone, disjoint, base, principal) are
//! checked by [`verify_theorem_g`].

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::estructure::{check_axioms, derive_relations, EStructure};
use crate::{AtomSet, Error};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalSpace {
    /// Each atom is an equivalence class of maximally specific states,
    /// listed in declaration order. Atoms are ordered by their first member.
    pub atoms: Vec<Vec<usize>>,
    /// `events[x]` is the set of atoms below state `x`.
    pub events: Vec<AtomSet>,
}

impl CanonicalSpace {
    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn event(&self, x: usize) -> &AtomSet {
        &self.events[x]
    }

    pub fn all_atoms(&self) -> AtomSet {
        (0..self.atoms.len()).collect()
    }

    /// Atom containing maximally specific state `m`, if any.
    pub fn atom_of(&self, m: usize) -> Option<usize> {
        self.atoms.iter().position(|class| class.contains(&m))
    }

    /// Atoms of the field generated by the events: atoms grouped by which
    /// events contain them.
    pub fn field_atoms(&self) -> Vec<AtomSet> {
        let mut groups: Vec<(Vec<bool>, AtomSet)> = Vec::new();
        for atom in 0..self.atoms.len() {
            let signature: Vec<bool> = self.events.iter().map(|e| e.contains(&atom)).collect();
            match groups.iter_mut().find(|(sig, _)| *sig == signature) {
                Some((_, set)) => {
                    set.insert(atom);
                }
                None => groups.push((signature, core::iter::once(atom).collect())),
            }
        }
        groups.into_iter().map(|(_, set)| set).collect()
    }

    /// The generated field is the full power set of atoms.
    pub fn field_is_power_set(&self) -> bool {
        self.field_atoms().iter().all(|k| k.len() == 1)
    }
}

pub fn build_canonical(s: &EStructure) -> Result<CanonicalSpace, Error> {
    let report = check_axioms(s);
    if !report.passes() {
        return Err(Error::AxiomsFailed(report));
    }
    let space = build_unchecked(s);
    let d = derive_relations(s);
    for x in s.states() {
        for y in s.states() {
            let subset = space.events[x].is_subset(&space.events[y]);
            if s.wms(x, y) != subset {
                return Err(Error::NotAnEmbedding(format!(
                    "monotone condition fails for ({}, {})",
                    s.name(x),
                    s.name(y)
                )));
            }
            let disjoint = space.events[x].is_disjoint(&space.events[y]);
            if d.incompat.get(x, y) != disjoint {
                return Err(Error::NotAnEmbedding(format!(
                    "disjoint condition fails for ({}, {})",
                    s.name(x),
                    s.name(y)
                )));
            }
        }
    }
    Ok(space)
}

pub(crate) fn build_unchecked(s: &EStructure) -> CanonicalSpace {
    let mut atoms: Vec<Vec<usize>> = Vec::new();
    for m in s.states().filter(|&m| s.is_maximally_specific(m)) {
        match atoms.iter_mut().find(|class| s.eqs(class[0], m)) {
            Some(class) => class.push(m),
            None => atoms.push(alloc::vec![m]),
        }
    }
    let events = s
        .states()
        .map(|x| {
            atoms
                .iter()
                .enumerate()
                .filter(|(_, class)| s.wms(class[0], x))
                .map(|(k, _)| k)
                .collect()
        })
        .collect();
    CanonicalSpace { atoms, events }
}

/// A violated condition of the canonical-space theorem, with witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TheoremGFailure {
    /// The root's event is not the whole space.
    Top,
    /// Some event is empty.
    EmptyEvent(usize),
    /// `x ⪰ y` disagrees with `e(x) ⊆ e(y)`.
    Monotone { x: usize, y: usize },
    /// `x ⊥ y` disagrees with `e(x) ∩ e(y) = ∅`.
    Disjoint { x: usize, y: usize },
    /// A nonempty field element (given by one of its field atoms) contains
    /// no event.
    Base(AtomSet),
    /// The field atoms do not partition the space, so some ultrafilter is
    /// not the point filter of its representative.
    Principal(AtomSet),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremGReport {
    pub failures: Vec<TheoremGFailure>,
    pub field_atom_count: usize,
}

impl TheoremGReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_theorem_g(c: &CanonicalSpace, s: &EStructure) -> TheoremGReport {
    let d = derive_relations(s);
    let mut failures = Vec::new();
    if c.events[s.root()] != c.all_atoms() {
        failures.push(TheoremGFailure::Top);
    }
    for x in s.states() {
        if c.events[x].is_empty() {
            failures.push(TheoremGFailure::EmptyEvent(x));
        }
    }
    for x in s.states() {
        for y in s.states() {
            if s.wms(x, y) != c.events[x].is_subset(&c.events[y]) {
                failures.push(TheoremGFailure::Monotone { x, y });
            }
            if d.incompat.get(x, y) != c.events[x].is_disjoint(&c.events[y]) {
                failures.push(TheoremGFailure::Disjoint { x, y });
            }
        }
    }
    // Every nonempty field element is a union of field atoms, so it is
    // enough that each field atom contains some event.
    let field_atoms = c.field_atoms();
    for k in &field_atoms {
        if !c.events.iter().any(|e| !e.is_empty() && e.is_subset(k)) {
            failures.push(TheoremGFailure::Base(k.clone()));
        }
    }
    // Ultrafilters of a finite field are the filters above its atoms. The
    // filter above K is the point filter of any ω ∈ K exactly when the field
    // atoms are pairwise disjoint and cover the space.
    let mut seen = BTreeSet::new();
    for k in &field_atoms {
        if k.is_empty() || !k.is_disjoint(&seen) {
            failures.push(TheoremGFailure::Principal(k.clone()));
        }
        seen.extend(k.iter().copied());
    }
    if seen != c.all_atoms() {
        failures.push(TheoremGFailure::Principal(seen));
    }
    TheoremGReport {
        failures,
        field_atom_count: field_atoms.len(),
    }
}

/// A violated embedding condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EmbeddingFailure {
    /// (H) the root is not mapped to the whole point set.
    RootNotFull,
    /// The map sends a state to the empty set.
    EmptyImage(usize),
    /// (H) `x ⪰ y` disagrees with `c(x) ⊆ c(y)`.
    Order { x: usize, y: usize },
    /// (P) incompatible states with overlapping images.
    Overlap { x: usize, y: usize },
    /// (Q) the images of `Y(z)` do not cover `c(z)`.
    Saturation(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingReport {
    pub failures: Vec<EmbeddingFailure>,
}

impl EmbeddingReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }

    /// Failures of condition (P).
    pub fn overlaps(&self) -> impl Iterator<Item = &EmbeddingFailure> {
        self.failures
            .iter()
            .filter(|f| matches!(f, EmbeddingFailure::Overlap { .. }))
    }
}

/// Checks that `map` embeds `s` into the point set `universe`.
pub fn verify_embedding<P: Ord + Clone>(
    s: &EStructure,
    universe: &BTreeSet<P>,
    map: &[BTreeSet<P>],
) -> Result<EmbeddingReport, Error> {
    if map.len() != s.len() {
        return Err(Error::Malformed(format!(
            "event map covers {} states, structure has {}",
            map.len(),
            s.len()
        )));
    }
    let d = derive_relations(s);
    let mut failures = Vec::new();
    if map[s.root()] != *universe {
        failures.push(EmbeddingFailure::RootNotFull);
    }
    for x in s.states() {
        if map[x].is_empty() {
            failures.push(EmbeddingFailure::EmptyImage(x));
        }
    }
    for x in s.states() {
        for y in s.states() {
            if s.wms(x, y) != map[x].is_subset(&map[y]) {
                failures.push(EmbeddingFailure::Order { x, y });
            }
            if x < y && d.incompat.get(x, y) && !map[x].is_disjoint(&map[y]) {
                failures.push(EmbeddingFailure::Overlap { x, y });
            }
        }
    }
    for z in s.states() {
        let children = &d.immediate[z];
        if children.is_empty() {
            continue;
        }
        let union: BTreeSet<P> = children.iter().flat_map(|&x| map[x].iter().cloned()).collect();
        if union != map[z] {
            failures.push(EmbeddingFailure::Saturation(z));
        }
    }
    Ok(EmbeddingReport { failures })
}
