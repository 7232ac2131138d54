//! The Heyting algebra of subpresheaves and an evaluator for the internal
//! language of the presheaf category.

mod formula;
mod subobject;

use thiserror::Error;

pub use formula::{evaluate, is_valid, Binder, Formula, Term};
pub use subobject::{
    all_subobjects, exists_along, for_each_subobject, forall_along, pullback_sub, Subpresheaf,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("selection is not stable: restricting element {element} of stage {stage} along {morphism} leaves it")]
    NotStable { morphism: String, stage: String, element: usize },
    #[error("subobjects have different parents")]
    ParentMismatch,
    #[error("more than {cap} subobjects")]
    CapExceeded { cap: usize },
    #[error("ill-sorted formula: {0}")]
    IllSorted(String),
    #[error("unbound variable {0}")]
    Unbound(String),
}
