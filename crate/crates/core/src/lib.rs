//! Finite evidential structures and subjective-conditional-expected-utility
//! (SCEU) rationalization of plans.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is pure
//! computation over finite carriers; parsing, JSON and the command line live
//! in the `evidential` companion crate.
//!
//! Modules, bottom-up:
//!
//! - [`relation`]: dense boolean relations and closure.
//! - [`estructure`]: evidential structures, derived relations, axioms, rank.
//! - [`canonical`]: the finite canonical sample space and embedding checks.
//! - [`trees`]: experimentation trees, partitions, branches, tree search.
//! - [`plans`]: plans, conditional preference relations, ISD consistency.
//! - [`lp`]: exact rational feasibility for arbitrary plans, with certificates.
//! - [`rationalize`]: the constructive SCEU rationalization of tree plans.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod canonical;
mod error;
pub mod estructure;
pub mod lp;
pub mod plans;
pub mod rationalize;
pub mod relation;
pub mod trees;

pub use error::Error;

/// Exact rational number used throughout.
pub type Rational = num_rational::BigRational;

/// A set of canonical atom indices.
pub type AtomSet = alloc::collections::BTreeSet<usize>;

pub use canonical::{build_canonical, verify_embedding, verify_theorem_g, CanonicalSpace};
pub use estructure::{check_axioms, derive_relations, rank, rank_level_sets, EStructure};
pub use lp::{decide_rationalizable, verify_certificate, FeasibilityResult, FeasibilitySystem};
pub use plans::{check_isd_plan, check_isd_relation, prop_b_relation, Plan};
pub use rationalize::{construct_sceu, lemma_z_branch, verify_rationalization, Rationalization};
pub use trees::{
    branches, check_graph_tree, check_tree, decompose_field_element, find_trees, partitions,
    tree_as_estructure, ExperimentationTree, TreeCandidate,
};
