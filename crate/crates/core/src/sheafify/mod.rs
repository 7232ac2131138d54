//! Sheaves for a coverage: the separated and sheaf predicates, the
//! associated sheaf `a(X) = C(X′) ⊆ P_J(X)`, the double-plus construction as
//! an independent oracle, extension along dense monos, left exactness and
//! exponentials of sheaves.

mod asf;
mod exponential;
mod lex;
mod plus;
mod predicates;

use thiserror::Error;

use crate::closure::ClosureError;
use crate::fincat::FinCatError;
use crate::logic::LogicError;
use crate::powerobj::PowerError;

pub use asf::{apply_functor, sheafify, sheafify_with_cap, Sheafification};
pub use exponential::{presheaf_exponential, sheaf_exponential, ExponentialWitness, SheafExponential};
pub use lex::{check_left_exactness, LexInstance, LexReport};
pub use plus::{double_plus_oracle, plus_construction, PlusConstruction};
pub use predicates::{
    amalgamate, extend_along_dense, is_separated, is_sheaf, matching_families, sheaf_check, MatchingFamily,
    SheafCheck, SheafFailure,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error("{0} is not a sheaf")]
    NotSheaf(String),
    #[error("map is not a dense monomorphism")]
    NotDenseMono,
    #[error("invalid exponential witness: {0}")]
    BadWitness(String),
    #[error("maps do not match: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Power(#[from] PowerError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    FinCat(#[from] FinCatError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}
