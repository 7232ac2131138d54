//! Families of small maps and a brute-force harness for their axioms.
//!
//! Every quantifier ranges over a finite [`Universe`]. Universal axioms are
//! checked by exhaustion. Existential ones (collection, weak
//! representability) can only be confirmed inside the universe, so their
//! outcomes are three-valued.

mod ambient;
mod axioms;
mod family;
mod p1;
mod s2;
mod sheaf;
mod universe;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::closure::ClosureError;
use crate::fincat::FinCatError;
use crate::logic::LogicError;
use crate::powerobj::PowerError;
use crate::sheafify::SheafError;

pub use ambient::{coproduct_map_in, Ambient, PowerStructure, Presheaves, Sheaves, Sum};
pub use axioms::{check_axiom, check_axioms, Axiom};
pub use family::{AllMaps, DeclaredMaps, LocallySmallMaps, MapFamily, PredicateFamily};
pub use p1::{check_p1, check_p1_with};
pub use s2::check_s2_bounded;
pub use sheaf::{check_sheaf_small_maps, SheafHarnessReport};
pub use universe::{ClosureCheck, Universe, UniverseMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmallMapsError {
    #[error("universe object {0} is not a sheaf")]
    NotSheaf(usize),
    #[error("malformed universe: {0}")]
    Malformed(String),
    #[error(transparent)]
    Power(#[from] PowerError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    FinCat(#[from] FinCatError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    Counterexample,
    UnknownWithinBounds,
    FoundWitness,
    NoneInUniverse,
    NotExercised,
}

/// One line of a harness report. `elapsed` counts the instances examined,
/// which unlike wall time is reproducible.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    pub elapsed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        matches!(self.status, Status::Verified | Status::FoundWitness)
    }
}

/// Accumulates the instances of one universally quantified statement.
/// Instances whose membership questions error out (a cap, say) leave the
/// statement undecided rather than refuted.
pub(crate) struct Tally {
    axiom: String,
    instances: usize,
    undecided: Vec<String>,
    counterexample: Option<Value>,
}

impl Tally {
    pub(crate) fn new(axiom: &str) -> Tally {
        Tally { axiom: axiom.to_string(), instances: 0, undecided: Vec::new(), counterexample: None }
    }

    /// Records one instance. Returns `false` once a counterexample is known,
    /// so callers can stop.
    pub(crate) fn record(&mut self, outcome: Result<bool, SmallMapsError>, instance: impl FnOnce() -> Value) -> bool {
        self.instances += 1;
        match outcome {
            Ok(true) => true,
            Ok(false) => {
                self.counterexample = Some(instance());
                false
            }
            Err(e) => {
                self.undecided.push(e.to_string());
                true
            }
        }
    }

    /// Records an existential instance: `Ok(None)` means no witness was
    /// found within bounds.
    pub(crate) fn record_search(&mut self, outcome: Result<Option<Value>, SmallMapsError>, instance: impl FnOnce() -> Value) {
        self.instances += 1;
        match outcome {
            Ok(Some(_)) => {}
            Ok(None) => self.undecided.push(format!("no witness for {}", instance())),
            Err(e) => self.undecided.push(e.to_string()),
        }
    }

    pub(crate) fn done(&self) -> bool {
        self.counterexample.is_some()
    }

    pub(crate) fn finish(self) -> AxiomReport {
        let (status, note) = if self.counterexample.is_some() {
            (Status::Counterexample, None)
        } else if let Some(first) = self.undecided.first() {
            (Status::UnknownWithinBounds, Some(format!("{} undecided instance(s); first: {first}", self.undecided.len())))
        } else {
            (Status::Verified, None)
        };
        AxiomReport { axiom: self.axiom, status, witness: None, counterexample: self.counterexample, elapsed: self.instances, note }
    }
}
