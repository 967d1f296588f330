use alloc::string::String;

use crate::estructure::AxiomReport;
use crate::plans::IsdReport;
use crate::trees::TreeReport;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("at least two states required")]
    TooFewStates,
    #[error("duplicate state id `{0}`")]
    DuplicateState(String),
    #[error("state index {0} out of range")]
    UnknownState(usize),
    #[error("structure fails the e-structure axioms")]
    AxiomsFailed(AxiomReport),
    #[error("event map is not an embedding: {0}")]
    NotAnEmbedding(String),
    #[error("candidate is not an experimentation tree")]
    NotATree(TreeReport),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("plan is not ISD consistent")]
    NotIsdConsistent(IsdReport),
    #[error("plan prescribes `{alternative}` at state {state}, nothing to avoid")]
    NothingToAvoid { state: usize, alternative: usize },
    #[error("field element is not a union of atoms of the tree")]
    NotRepresentable,
    #[error("result does not belong to this system: {0}")]
    Mismatch(String),
    #[error("malformed rationalization: {0}")]
    Malformed(String),
}
