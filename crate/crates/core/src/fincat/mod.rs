//! Finite categories, presheaves of finite sets and natural transformations,
//! together with the pointwise limit, colimit and quotient constructions.
//!
//! Throughout, for `φ: b → a` the action of a presheaf goes `X(a) → X(b)`.

mod category;
mod construct;
mod diagram;
pub mod enumerate;
mod presheaf;
pub mod search;

use thiserror::Error;

pub use category::{validate_category, FinCategory, LawViolation, Mor, Morphism, Obj, ValidationReport};
pub use construct::{
    binary_product, coequalizer, coproduct, coproduct_map, diagonal, equalizer, graph, image_factorization,
    kernel_pair, product, product_map, pullback, quotient_by_equivalence, Coproduct, ImageFactorization,
    Product, Pullback,
};
pub use diagram::{colimit, limit, Colimit, DiagramArrow, Limit, PresheafDiagram};
pub use presheaf::{yoneda, NatTrans, Presheaf};
pub use search::{are_isomorphic, find_iso, homs};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FinCatError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("not functorial: {0}")]
    NotFunctorial(String),
    #[error("not natural: {0}")]
    NotNatural(String),
    #[error("diagram does not commute: {0}")]
    NotCommuting(String),
    #[error("not an equivalence relation at stage {stage}: {law} fails for pair {pair:?}")]
    NotEquivalence { stage: String, pair: (usize, usize), law: &'static str },
}
