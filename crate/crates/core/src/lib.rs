//! Lawvere-Tierney coverages, closure operators, power objects and the
//! associated sheaf functor over presheaves on finite categories, with a
//! brute-force harness for the axioms of small maps.

pub mod fincat;
pub mod logic;
pub mod site;
pub mod closure;
pub mod powerobj;
pub mod sheafify;
pub mod smallmaps;
